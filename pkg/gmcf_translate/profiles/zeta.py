"""Singular profile integrator in the angle variable ``zeta = Psi / sqrt(1 + Psi^2)``.

The axis singularity ``(N - 1) zeta / r`` is handled by a series start;
blow-up profiles are integrated with the embedded pair ``DOP853`` up to
``|zeta| = 1 - delta``; entire profiles use ``LSODA`` because their far field
is stiff, and continue in the slope variable once ``|zeta|`` is close to one.
"""

from __future__ import annotations

import logging
import math
from typing import Any

import numpy as np
from scipy.integrate import solve_ivp

from gmcf_translate.core import FlowParams, RegimeTag, classify_regime, r_infinity_bounds
from gmcf_translate.exceptions import BlowupUndetected
from gmcf_translate.profiles._common import (
    check_ivp,
    flat_solution,
    make_forcing,
    psi_state_piece,
    series_piece,
    series_start,
    zeta_state_piece,
)
from gmcf_translate.profiles._types import IntegratorOptions, ProfileIntegrator, ProfileInterpolant, ProfileSolution

logger = logging.getLogger(__name__)


def integrate_zeta(params: FlowParams, c: float, opts: IntegratorOptions | None = None) -> ProfileSolution:
    """Integrate the profile equation in the ``zeta`` form.

    Parameters
    ----------
    params : FlowParams
        Flow parameters.
    c : float
        Translation speed (``c >= 0``).
    opts : IntegratorOptions, optional
        Integration controls.

    Returns
    -------
    ProfileSolution
        Samples on ``[0, r_end]``; ``reached_cutoff`` marks a blow-up.

    Raises
    ------
    BlowupUndetected
        If a blow-up regime passes its proved radius bound without reaching the cutoff.
    StepFailure
        If the integrator cannot proceed.
    """
    opts = opts or IntegratorOptions()
    regime = classify_regime(params, c)
    if regime is RegimeTag.C_EQ_B:
        return flat_solution(params, c, opts)

    N = params.N
    forcing = make_forcing(params, c)
    r0, zeta0, phi0 = series_start(params, c, opts)
    limit = 1.0 - opts.zeta_cutoff
    atol = opts.tol * 1e-3

    def rhs(r: float, y: np.ndarray) -> list[float]:
        z = y[0]
        rad = 1.0 - z * z
        if rad <= 0.0:
            rad = 1e-300
        cos = math.sqrt(rad)
        return [forcing(cos) - (N - 1) * z / r, z / cos]

    def cutoff(r: float, y: np.ndarray) -> float:
        return abs(y[0]) - limit

    cutoff.terminal = True
    cutoff.direction = 1

    def switch(r: float, y: np.ndarray) -> float:
        return abs(y[0]) - opts.zeta_switch

    switch.terminal = True
    switch.direction = 1

    if regime.blows_up:
        method, events = "DOP853", [cutoff]
    else:
        method, events = "LSODA", [switch]
    logger.debug("zeta form c=%.12g regime=%s method=%s r0=%.3g", c, regime.value, method, r0)
    first = solve_ivp(
        rhs,
        (r0, opts.r_max),
        [zeta0, phi0],
        method=method,
        rtol=opts.tol,
        atol=atol,
        dense_output=True,
        events=events,
    )
    check_ivp(first, "zeta-form")

    r_nodes = [np.array([0.0]), first.t]
    zeta_nodes = [np.array([0.0]), first.y[0]]
    phi_nodes = [np.array([0.0]), first.y[1]]
    pieces = [series_piece(params, c, r0), zeta_state_piece(first.sol, r0, float(first.t[-1]))]
    nfev = int(first.nfev)
    reached_cutoff = regime.blows_up and first.status == 1
    stages = [method]

    if not regime.blows_up and first.status == 1:
        r1 = float(first.t[-1])
        z1 = float(first.y[0, -1])
        second = _continue_in_psi(params, c, r1, z1 / math.sqrt(1.0 - z1 * z1), float(first.y[1, -1]), opts)
        psi2 = second.y[0]
        r_nodes.append(second.t[1:])
        zeta_nodes.append(psi2[1:] / np.sqrt(1.0 + psi2[1:] ** 2))
        phi_nodes.append(second.y[1, 1:])
        pieces.append(psi_state_piece(second.sol, r1, float(second.t[-1])))
        nfev += int(second.nfev)
        stages.append("LSODA/psi")

    r_grid = np.concatenate(r_nodes)
    zeta = np.concatenate(zeta_nodes)
    phi = np.concatenate(phi_nodes)
    psi = _psi_from_nodes(r_grid, zeta, pieces)

    if regime.blows_up and not reached_cutoff:
        _, upper = r_infinity_bounds(params, c)
        if r_grid[-1] >= upper * (1.0 + 1e-6):
            raise BlowupUndetected(
                f"c={c}: integrated to r={r_grid[-1]:.6g} beyond the proved bound {upper:.6g} without blow-up"
            )

    return ProfileSolution(
        params=params,
        c=c,
        regime=regime,
        r_grid=r_grid,
        zeta=zeta,
        psi=psi,
        phi=phi,
        method="zeta",
        reached_cutoff=reached_cutoff,
        metadata={"nfev": nfev, "stages": stages, "r_series": r0},
        dense=ProfileInterpolant(pieces),
    )


def _continue_in_psi(
    params: FlowParams, c: float, r1: float, psi1: float, phi1: float, opts: IntegratorOptions
) -> Any:
    """Continue an entire profile in the slope variable from ``r1``."""
    N = params.N
    forcing = make_forcing(params, c)

    def rhs(r: float, y: np.ndarray) -> list[float]:
        p = y[0]
        xi = math.sqrt(1.0 + p * p)
        cos = 1.0 / xi
        return [xi**3 * (forcing(cos) - (N - 1) * p * cos / r), p]

    second = solve_ivp(
        rhs,
        (r1, opts.r_max),
        [psi1, phi1],
        method="LSODA",
        rtol=opts.tol,
        atol=opts.tol * 1e-3,
        dense_output=True,
    )
    check_ivp(second, "psi-form")
    return second


def _psi_from_nodes(r_grid: np.ndarray, zeta: np.ndarray, pieces: list) -> np.ndarray:
    """Slopes at the nodes, taken from the slope-form segment where it exists."""
    psi = zeta / np.sqrt(np.maximum(1.0 - zeta**2, 1e-300))
    if len(pieces) == 3:
        start, end, fields = pieces[2]
        mask = r_grid > start
        psi[mask] = fields(r_grid[mask])[1]
    return psi


class ZetaIntegrator(ProfileIntegrator):
    """Singular integrator in the ``zeta`` form (the default)."""

    name = "zeta"

    def __call__(self, params: FlowParams, c: float, opts: IntegratorOptions) -> ProfileSolution:
        """Integrate the profile for speed *c*."""
        return integrate_zeta(params, c, opts)
