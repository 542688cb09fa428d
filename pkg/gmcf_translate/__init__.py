"""Translating solutions of the forced power mean curvature flow in radial symmetry."""

from gmcf_translate.core import (
    FlowParams,
    InfiniteSlope,
    PowerSpec,
    RegimeTag,
    classify_regime,
    curvature_radial,
    r_infinity_bounds,
    signed_pow,
)
from gmcf_translate.evolve import (
    EvolutionState,
    Hypothesis,
    HypothesisTag,
    InitialData,
    check_hypotheses,
    convergence_metric,
    evolve,
    init_state,
    step,
)
from gmcf_translate.models import ConvergenceRecord, EstimateReport, IntersectionTrace, TravelingReference
from gmcf_translate.profiles import (
    INTEGRATOR_REGISTRY,
    IntegratorOptions,
    ProfileIntegrator,
    ProfileSolution,
    integrate_psi_epsilon,
    integrate_zeta,
    solve_profile,
)
from gmcf_translate.speed import SpeedResult, admissibility, find_speed, find_speed_for_radius, translating_solution

__all__ = [
    "ConvergenceRecord",
    "EstimateReport",
    "EvolutionState",
    "FlowParams",
    "Hypothesis",
    "HypothesisTag",
    "INTEGRATOR_REGISTRY",
    "InfiniteSlope",
    "InitialData",
    "IntegratorOptions",
    "IntersectionTrace",
    "PowerSpec",
    "ProfileIntegrator",
    "ProfileSolution",
    "RegimeTag",
    "SpeedResult",
    "TravelingReference",
    "admissibility",
    "check_hypotheses",
    "classify_regime",
    "convergence_metric",
    "curvature_radial",
    "evolve",
    "find_speed",
    "find_speed_for_radius",
    "init_state",
    "integrate_psi_epsilon",
    "integrate_zeta",
    "r_infinity_bounds",
    "signed_pow",
    "solve_profile",
    "step",
    "translating_solution",
]
