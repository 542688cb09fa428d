"""Regularized profile integrator used as an independent oracle.

Replaces ``(N - 1)/r`` by ``(N - 1)/(r + eps)`` so the slope equation is a
regular IVP from ``psi(0) = 0``. The regularized slopes decrease to the
singular profile as ``eps`` decreases.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.integrate import solve_ivp

from gmcf_translate.core import FlowParams, RegimeTag, classify_regime
from gmcf_translate.exceptions import DomainError
from gmcf_translate.profiles._common import (
    attach_r_infinity,
    check_ivp,
    flat_solution,
    make_forcing,
    psi_state_piece,
)
from gmcf_translate.profiles._types import IntegratorOptions, ProfileIntegrator, ProfileInterpolant, ProfileSolution

logger = logging.getLogger(__name__)


def integrate_psi_epsilon(
    params: FlowParams, c: float, eps: float, opts: IntegratorOptions | None = None
) -> ProfileSolution:
    """Integrate the ``eps``-regularized slope equation.

    Parameters
    ----------
    params : FlowParams
        Flow parameters.
    c : float
        Translation speed (``c >= 0``).
    eps : float
        Regularization (``eps > 0``).
    opts : IntegratorOptions, optional
        Integration controls; the blow-up cutoff matches the ``zeta`` form.

    Returns
    -------
    ProfileSolution
        With ``method="psi_epsilon"`` and ``eps`` set; blow-up profiles carry
        their own maximal-radius estimate.
    """
    if not eps > 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    opts = opts or IntegratorOptions()
    regime = classify_regime(params, c)
    if regime is RegimeTag.C_EQ_B:
        return flat_solution(params, c, opts, method="psi_epsilon").replace(eps=eps)

    N = params.N
    forcing = make_forcing(params, c)
    limit = 1.0 - opts.zeta_cutoff
    psi_cut = limit / math.sqrt(1.0 - limit * limit)

    def rhs(r: float, y: np.ndarray) -> list[float]:
        p = y[0]
        xi = math.sqrt(1.0 + p * p)
        return [xi * xi * (forcing(1.0 / xi) * xi - (N - 1) * p / (r + eps)), p]

    def cutoff(r: float, y: np.ndarray) -> float:
        return abs(y[0]) - psi_cut

    cutoff.terminal = True
    cutoff.direction = 1

    # the (N-1)/(r+eps) relaxation is stiff for small eps, so let LSODA switch
    result = solve_ivp(
        rhs,
        (0.0, opts.r_max),
        [0.0, 0.0],
        method="LSODA",
        rtol=opts.tol,
        atol=opts.tol * 1e-3,
        dense_output=True,
        events=[cutoff] if regime.blows_up else None,
    )
    check_ivp(result, f"eps={eps:g}")
    psi = result.y[0]
    logger.debug("eps form c=%.12g eps=%g nfev=%d", c, eps, result.nfev)
    sol = ProfileSolution(
        params=params,
        c=c,
        regime=regime,
        r_grid=result.t,
        zeta=psi / np.sqrt(1.0 + psi**2),
        psi=psi,
        phi=result.y[1],
        method="psi_epsilon",
        eps=eps,
        reached_cutoff=regime.blows_up and result.status == 1,
        metadata={"nfev": int(result.nfev), "stages": ["LSODA/psi_eps"]},
        dense=ProfileInterpolant([psi_state_piece(result.sol, 0.0, float(result.t[-1]))]),
    )
    return attach_r_infinity(sol)


class EpsilonIntegrator(ProfileIntegrator):
    """Regularized integrator with a fixed ``eps``.

    Parameters
    ----------
    eps : float
        Regularization parameter.
    """

    name = "psi_epsilon"

    def __init__(self, eps: float = 1e-8) -> None:
        if not eps > 0:
            raise ValueError(f"eps must be > 0, got {eps}")
        self.eps = eps

    def __call__(self, params: FlowParams, c: float, opts: IntegratorOptions) -> ProfileSolution:
        """Integrate the regularized profile for speed *c*."""
        return integrate_psi_epsilon(params, c, self.eps, opts)
