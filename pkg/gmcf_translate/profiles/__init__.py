"""Translating-profile integrators.

Provides the singular ``zeta``-form integrator, the regularized
``eps``-form oracle, far-field analysis helpers and the
``ProfileIntegrator`` interface both integrators satisfy.

The ``solve_profile()`` facade integrates, attaches the maximal-radius
estimate and cross-checks against the regularized oracle.
"""

from __future__ import annotations

import logging

from gmcf_translate.core import FlowParams, RegimeTag
from gmcf_translate.profiles._common import (
    attach_r_infinity,
    compare_profiles,
    estimate_r_infinity,
    flat_solution,
    make_forcing,
    series_coefficients,
    tail_integral,
)
from gmcf_translate.profiles._types import (
    IntegratorOptions,
    IntegratorRegistry,
    ProfileIntegrator,
    ProfileInterpolant,
    ProfileSolution,
)
from gmcf_translate.profiles.analysis import (
    MonotonicityReport,
    SandwichReport,
    asymptotic_value,
    cone_slope,
    monotonicity_probe,
    sandwich_bounds,
    v_shape_defect,
)
from gmcf_translate.profiles.epsilon import EpsilonIntegrator, integrate_psi_epsilon
from gmcf_translate.profiles.zeta import ZetaIntegrator, integrate_zeta

logger = logging.getLogger(__name__)

CROSS_CHECK_EPS = (1e-2, 1e-3, 1e-4)

__all__ = [
    "CROSS_CHECK_EPS",
    "EpsilonIntegrator",
    "INTEGRATOR_REGISTRY",
    "IntegratorOptions",
    "IntegratorRegistry",
    "MonotonicityReport",
    "ProfileIntegrator",
    "ProfileInterpolant",
    "ProfileSolution",
    "SandwichReport",
    "ZetaIntegrator",
    "asymptotic_value",
    "attach_r_infinity",
    "compare_profiles",
    "cone_slope",
    "estimate_r_infinity",
    "flat_solution",
    "integrate_psi_epsilon",
    "integrate_zeta",
    "make_forcing",
    "monotonicity_probe",
    "sandwich_bounds",
    "series_coefficients",
    "solve_profile",
    "tail_integral",
    "v_shape_defect",
]

from gmcf_translate.profiles._types import INTEGRATOR_REGISTRY  # noqa: E402

INTEGRATOR_REGISTRY.register("zeta", ZetaIntegrator)
INTEGRATOR_REGISTRY.register("psi_epsilon", EpsilonIntegrator)


def solve_profile(
    params: FlowParams,
    c: float,
    opts: IntegratorOptions | None = None,
    cross_check: bool = True,
    eps_values: tuple[float, ...] = CROSS_CHECK_EPS,
) -> ProfileSolution:
    """Integrate the translating profile for speed *c*.

    Parameters
    ----------
    params : FlowParams
        Flow parameters.
    c : float
        Translation speed (``c >= 0``).
    opts : IntegratorOptions, optional
        Integration controls.
    cross_check : bool
        Compare against the regularized oracle at each ``eps`` in
        *eps_values*; the report is stored in ``metadata["cross_check"]``.
    eps_values : tuple[float, ...]
        Regularization parameters of the cross-check.

    Returns
    -------
    ProfileSolution
        With ``r_inf``, ``r_inf_bracket`` and ``phi_end`` set for blow-up profiles.

    Raises
    ------
    CrossCheckFailure
        If the oracle disagrees with the singular integration.
    """
    opts = opts or IntegratorOptions()
    sol = attach_r_infinity(integrate_zeta(params, c, opts))
    logger.info(
        "profile c=%.12g regime=%s r_end=%.6g r_inf=%s",
        c,
        sol.regime.value,
        sol.r_end,
        f"{sol.r_inf:.12g}" if sol.r_inf is not None else "none",
    )
    if not cross_check or sol.regime is RegimeTag.C_EQ_B:
        return sol
    oracle_opts = opts if sol.regime.blows_up else opts.replace(r_max=min(opts.r_max, opts.check_radius))
    candidates = [integrate_psi_epsilon(params, c, eps, oracle_opts) for eps in eps_values]
    report = compare_profiles(sol, candidates, opts)
    return sol.replace(metadata={**sol.metadata, "cross_check": report})
