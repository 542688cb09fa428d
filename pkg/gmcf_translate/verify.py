"""Acceptance suite.

Each criterion is a function registered in :data:`CRITERIA` under a name and
a group. It receives ``quick`` (coarse grids, shorter runs, looser limits)
and a seeded random generator, and returns a details mapping with a
``passed`` flag.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from typing import Any

import numpy as np

from gmcf_translate.core import FlowParams, r_infinity_bounds
from gmcf_translate.diagnostics import curvature_floor
from gmcf_translate.evolve import (
    Hypothesis,
    check_hypotheses,
    comparison_check,
    evolve,
    init_state,
    profile_data,
    quadratic_data,
    reference_on_grid,
)
from gmcf_translate.exceptions import GMCFError
from gmcf_translate.models import TravelingReference
from gmcf_translate.profiles import (
    EpsilonIntegrator,
    IntegratorOptions,
    asymptotic_value,
    attach_r_infinity,
    integrate_zeta,
    solve_profile,
    v_shape_defect,
)
from gmcf_translate.speed import find_speed, psi_at_one, translating_solution

logger = logging.getLogger(__name__)

CriterionFunc = Callable[[bool, np.random.Generator], dict[str, Any]]


@dataclass(frozen=True)
class Criterion:
    """Registered acceptance criterion."""

    name: str
    group: str
    func: CriterionFunc
    description: str


CRITERIA: dict[str, Criterion] = {}


def criterion(name: str, group: str, description: str) -> Callable[[CriterionFunc], CriterionFunc]:
    """Register the decorated function as an acceptance criterion."""

    def register(func: CriterionFunc) -> CriterionFunc:
        if name in CRITERIA:
            raise ValueError(f"criterion {name!r} already registered")
        CRITERIA[name] = Criterion(name, group, func, description)
        return func

    return register


def select(only: Iterable[str] | None = None) -> list[Criterion]:
    """Criteria whose name or group is in *only*, all when ``None``.

    Raises
    ------
    ValueError
        If a selector matches nothing.
    """
    if not only:
        return list(CRITERIA.values())
    selectors = set(only)
    unknown = selectors - {c.name for c in CRITERIA.values()} - {c.group for c in CRITERIA.values()}
    if unknown:
        raise ValueError(f"unknown criteria or groups {sorted(unknown)}; available {sorted(CRITERIA)}")
    return [c for c in CRITERIA.values() if c.name in selectors or c.group in selectors]


def run_suite(only: Iterable[str] | None = None, quick: bool = False, seed: int = 0) -> list[dict[str, Any]]:
    """Run the selected criteria and return one result row per criterion."""
    rows = []
    for crit in select(only):
        rng = np.random.default_rng(seed)
        start = time.perf_counter()
        try:
            details = crit.func(quick, rng)
            passed = bool(details.pop("passed"))
        except GMCFError as exc:
            logger.exception("criterion %s raised", crit.name)
            details = {"error": type(exc).__name__, "message": str(exc)}
            passed = False
        seconds = time.perf_counter() - start
        logger.info("%-20s %s (%.1f s)", crit.name, "PASS" if passed else "FAIL", seconds)
        rows.append(
            {
                "name": crit.name,
                "group": crit.group,
                "description": crit.description,
                "passed": passed,
                "quick": quick,
                "seconds": round(seconds, 3),
                "details": details,
            }
        )
    return rows


def format_table(rows: list[dict[str, Any]]) -> str:
    """Plain-text pass/fail table."""
    width = max((len(r["name"]) for r in rows), default=4)
    lines = [f"{'criterion':<{width}}  group          result  seconds"]
    for r in rows:
        status = "PASS" if r["passed"] else "FAIL"
        lines.append(f"{r['name']:<{width}}  {r['group']:<13}  {status:<6}  {r['seconds']:>7.1f}")
    return "\n".join(lines)


def refinement_ratio(coarse: np.ndarray, mid: np.ndarray, fine: np.ndarray) -> float:
    """``|coarse - mid| / |mid - fine|`` in the sup norm on the coarse nodes.

    The finer arrays are restricted to the coarse nodes by striding.
    """
    stride_mid = (mid.size - 1) // (coarse.size - 1)
    stride_fine = (fine.size - 1) // (coarse.size - 1)
    mid_c = mid[::stride_mid]
    fine_c = fine[::stride_fine]
    if not (mid_c.size == coarse.size == fine_c.size):
        raise ValueError("grids are not nested refinements")
    return float(np.max(np.abs(coarse - mid_c)) / np.max(np.abs(mid_c - fine_c)))


# -- profiles ----------------------------------------------------------------


@criterion("exact_degenerate", "exact", "b=-1, c=0 reproduces zeta=r/2, Phi=2-sqrt(4-r^2), R_inf=2")
def _exact_degenerate(quick: bool, rng: np.random.Generator) -> dict[str, Any]:
    params = FlowParams(N=2, alpha=1.0, b=-1.0)
    sol = attach_r_infinity(integrate_zeta(params, 0.0))
    r = np.linspace(0.0, 1.9, 400)
    zeta_err = float(np.max(np.abs(sol.zeta_at(r) - r / 2)))
    phi_err = float(np.max(np.abs(sol.phi_at(r) - (2.0 - np.sqrt(4.0 - r**2)))))
    r_err = abs(sol.r_inf - 2.0)
    return {
        "passed": zeta_err <= 1e-8 and phi_err <= 1e-8 and r_err <= 1e-4,
        "zeta_error": zeta_err,
        "phi_error": phi_err,
        "r_inf": sol.r_inf,
    }


@criterion("flat", "exact", "c = b > 0 gives Phi == 0")
def _flat(quick: bool, rng: np.random.Generator) -> dict[str, Any]:
    worst = 0.0
    for b in (0.5, 3.0, 10.0):
        sol = solve_profile(FlowParams(N=2, alpha=1.0, b=b), b)
        worst = max(worst, float(np.max(np.abs(sol.psi))), float(np.max(np.abs(sol.phi))))
    return {"passed": worst <= 1e-12, "max_abs": worst}


def _inside(bracket: tuple[float, float], lo: float, hi: float) -> bool:
    slack = 1e-6 * hi
    return bracket[0] >= lo - slack and bracket[1] <= hi + slack


@criterion("r_inf_bounds", "bounds", "R_inf brackets lie inside the proved enclosures")
def _r_inf_bounds(quick: bool, rng: np.random.Generator) -> dict[str, Any]:
    failures = []
    for _ in range(10 if quick else 50):
        N = int(rng.choice([2, 3, 4]))
        params = FlowParams(N=N, alpha=float(rng.choice([0.5, 1.0, 2.0])), b=-float(rng.uniform(0.2, 3.0)))
        c = float(rng.uniform(0.1, 5.0))
        sol = attach_r_infinity(integrate_zeta(params, c))
        lo, hi = r_infinity_bounds(params, c)
        if not _inside(sol.r_inf_bracket, lo, hi):
            failures.append({"params": params.to_dict(), "c": c, "bracket": sol.r_inf_bracket, "bounds": [lo, hi]})
    odd = [(1, 3), (1, 1), (3, 1), (3, 5)]
    for _ in range(5 if quick else 20):
        q, p = odd[int(rng.integers(len(odd)))]
        b = float(rng.uniform(0.5, 3.0))
        params = FlowParams.with_odd_alpha(N=int(rng.choice([2, 3])), q=q, p=p, b=b)
        c = b * float(rng.uniform(0.1, 0.9))
        sol = attach_r_infinity(integrate_zeta(params, c, IntegratorOptions(r_max=1e5)))
        lo, hi = r_infinity_bounds(params, c)
        if sol.r_inf_bracket is None or not _inside(sol.r_inf_bracket, lo, hi):
            failures.append({"params": params.to_dict(), "c": c, "bracket": sol.r_inf_bracket, "bounds": [lo, hi]})
    return {"passed": not failures, "failures": failures}


@criterion("asymptotic_exponent", "asymptotics", "b = 0: Phi grows like c r^(alpha+1) / ((alpha+1)(N-1)^alpha)")
def _asymptotic_exponent(quick: bool, rng: np.random.Generator) -> dict[str, Any]:
    rows = []
    for alpha, N in ((1.0, 2), (2.0, 3), (0.5, 2)):
        params = FlowParams(N=N, alpha=alpha, b=0.0)
        sol = integrate_zeta(params, 1.0, IntegratorOptions(r_max=500.0))
        r = np.geomspace(50.0, 500.0, 40)
        slope = float(np.polyfit(np.log(r), np.log(sol.phi_at(r)), 1)[0])
        prefactor = float(sol.phi_at(500.0) / 500.0 ** (alpha + 1))
        expected = asymptotic_value(params, 1.0, 1.0)
        rows.append(
            {
                "alpha": alpha,
                "N": N,
                "slope": slope,
                "prefactor": prefactor,
                "expected_prefactor": expected,
                "ok": abs(slope - (alpha + 1)) <= 0.02 * (alpha + 1) and abs(prefactor - expected) <= 0.05 * expected,
            }
        )
    return {"passed": all(row["ok"] for row in rows), "cases": rows}


@criterion("cone_slope", "asymptotics", "c > b > 0: slope tends to sqrt(c^2-b^2)/b, cone defect grows")
def _cone_slope(quick: bool, rng: np.random.Generator) -> dict[str, Any]:
    rows = []
    for N in (2, 3):
        params = FlowParams(N=N, alpha=1.0, b=3.0)
        sol = integrate_zeta(params, 5.0, IntegratorOptions(r_max=250.0))
        psi = float(sol.psi_at(200.0))
        corrected = asymptotic_value(params, 5.0, 200.0, "psi_corrected")
        limit = asymptotic_value(params, 5.0, 200.0)
        correction = limit - corrected
        growth = float(v_shape_defect(sol, 200.0) - v_shape_defect(sol, 100.0))
        rows.append(
            {
                "N": N,
                "psi_200": psi,
                "corrected": corrected,
                "defect_growth": growth,
                "ok": abs(psi - corrected) <= 5e-4 and abs(psi - limit) <= 1.2 * correction and growth > 0,
            }
        )
    return {"passed": all(row["ok"] for row in rows), "cases": rows}


# -- speed selection ---------------------------------------------------------


def _random_speed_problem(case: str, rng: np.random.Generator) -> FlowParams:
    if case == "a":
        return FlowParams(N=2, alpha=float(rng.choice([0.5, 1.0, 2.0])), b=0.0, k=float(rng.uniform(0.2, 3.0)))
    if case == "b":
        return FlowParams(N=2, alpha=1.0, b=-float(rng.uniform(0.1, 1.0)), k=float(rng.uniform(1.0, 3.0)))
    if case == "c":
        N = int(rng.choice([2, 3]))
        return FlowParams(N=N, alpha=1.0, b=float(rng.uniform(0.5, 3.0)), k=float(rng.uniform(0.2, 2.0)))
    return FlowParams.with_odd_alpha(N=2, q=1, p=3, b=float(rng.uniform(1.5, 2.5)), k=-float(rng.uniform(0.2, 1.0)))


@criterion("speed_residual", "speed", "|Psi(1; c~) - k| small and the regularized oracle agrees on c~")
def _speed_residual(quick: bool, rng: np.random.Generator) -> dict[str, Any]:
    rows = []
    for case in ("a", "b", "c", "d"):
        for _ in range(2 if quick else 5):
            params = _random_speed_problem(case, rng)
            result = find_speed(params)
            k = float(params.k)
            oracle = find_speed(params, integrator=EpsilonIntegrator())
            shift = abs(oracle.c_tilde - result.c_tilde) / max(1.0, abs(result.c_tilde))
            rows.append(
                {
                    "case": result.case_tag,
                    "b": params.b,
                    "k": k,
                    "c_tilde": result.c_tilde,
                    "residual": result.residual,
                    "oracle_shift": shift,
                    "ok": abs(result.residual) <= 1e-8 * max(1.0, abs(k)) and shift <= 1e-6,
                }
            )
    return {"passed": all(row["ok"] for row in rows), "cases": rows}


@criterion("monotonicity", "monotonicity", "Psi(1; c) increases in c; R_inf is monotone in c")
def _monotonicity(quick: bool, rng: np.random.Generator) -> dict[str, Any]:
    failures = []
    opts = IntegratorOptions(r_max=1.0)
    for _ in range(4 if quick else 10):
        b = float(rng.uniform(-2.0, 2.0))
        params = FlowParams(N=int(rng.choice([2, 3])), alpha=float(rng.choice([0.5, 1.0, 2.0])), b=b)
        base = max(b, 0.0)
        speeds = np.sort(base + rng.uniform(0.1, 3.0, 10))
        values = [psi_at_one(integrate_zeta(params, float(c), opts)) for c in speeds]
        if not all(v2 > v1 or (math.isinf(v1) and v1 == v2 > 0) for v1, v2 in zip(values, values[1:])):
            failures.append({"b": b, "speeds": speeds, "psi_one": values})

    radius_cases = [
        (FlowParams(N=2, alpha=1.0, b=-1.0), np.linspace(0.2, 3.0, 6), -1),
        (FlowParams.with_odd_alpha(N=2, q=1, p=3, b=1.0), np.linspace(0.3, 0.9, 4), 1),
    ]
    wide = IntegratorOptions(r_max=1e5)
    for params, speeds, direction in radius_cases:
        radii = [attach_r_infinity(integrate_zeta(params, float(c), wide)).r_inf for c in speeds]
        if not all(direction * (r2 - r1) > 0 for r1, r2 in zip(radii, radii[1:])):
            failures.append({"b": params.b, "speeds": speeds, "r_inf": radii})
    return {"passed": not failures, "failures": failures}


# -- evolution ---------------------------------------------------------------


def _grid(quick: bool, full: int) -> int:
    return 64 if quick else full


@criterion("ts_fixed_point", "evolution", "the translating solution stays a fixed point of the scheme")
def _ts_fixed_point(quick: bool, rng: np.random.Generator) -> dict[str, Any]:
    T = 0.5 if quick else 5.0
    limit = 1e-3 if quick else 1e-5
    problems = [
        FlowParams(N=2, alpha=1.0, b=0.0, k=1.0),
        FlowParams(N=2, alpha=1.0, b=-1.0, k=1.0),
        FlowParams(N=2, alpha=1.0, b=3.0, k=1.0),
        FlowParams.with_odd_alpha(N=2, q=1, p=3, b=3.0, k=-1.0),
    ]
    rows = []
    for params in problems:
        c_tilde, profile = translating_solution(params)
        state = init_state(profile_data(profile), params, M=_grid(quick, 256))
        ref = TravelingReference(c_tilde=c_tilde, phi=state.u.copy())
        _, record, _ = evolve(state, T, reference=ref)
        worst = max(record.oscillation)
        rows.append(
            {"b": params.b, "k": float(params.k), "c_tilde": c_tilde, "oscillation": worst, "ok": worst <= limit}
        )
    return {"passed": all(row["ok"] for row in rows), "limit": limit, "cases": rows}


def _case_c_run(quick: bool) -> tuple[Any, Any, Any, Any]:
    params = FlowParams(N=2, alpha=1.0, b=3.0, k=1.0)
    state = init_state(quadratic_data(1.0), params, M=_grid(quick, 256))
    ref = reference_on_grid(params, state.r_grid)
    final, record, report = evolve(state, 10.0, reference=ref, sample_interval=0.1)
    return params, ref, record, report


@criterion("convergence", "evolution", "case C run converges to the translating solution")
def _convergence(quick: bool, rng: np.random.Generator) -> dict[str, Any]:
    params, ref, record, _ = _case_c_run(quick)
    times = np.asarray(record.times)
    osc_1 = record.oscillation[int(np.argmin(np.abs(times - 1.0)))]
    osc_10 = record.oscillation[-1]
    speed = record.mean_front_speed(5.0, 10.0)
    return {
        "passed": osc_10 <= 0.1 * osc_1 and abs(speed - ref.c_tilde) <= 0.01 * ref.c_tilde,
        "oscillation_t1": osc_1,
        "oscillation_t10": osc_10,
        "front_speed": speed,
        "c_tilde": ref.c_tilde,
    }


@criterion("estimates", "bounds", "observed extrema stay bounded and the curvature floor holds")
def _estimates(quick: bool, rng: np.random.Generator) -> dict[str, Any]:
    rows = []
    params, ref, _, report = _case_c_run(quick)
    floor, _ = curvature_floor(params, ref.c_tilde, np.linspace(0.0, 1.0, _grid(quick, 256) + 1))
    budget = 0.05 if quick else 0.01
    rows.append(
        {
            "case": "C",
            "flagged": report.flagged,
            "Hstar_obs": report.Hstar_obs,
            "floor": floor,
            "ok": not report.flagged and report.Hstar_obs >= floor * (1.0 - budget),
        }
    )
    others = [
        ("B", FlowParams(N=2, alpha=1.0, b=-1.0, k=1.0), quadratic_data(1.0)),
        ("D", FlowParams.with_odd_alpha(N=2, q=1, p=3, b=3.0, k=-1.0), quadratic_data(-1.0)),
    ]
    T = 2.0 if quick else 10.0
    for case, p, data in others:
        state = init_state(data, p, M=_grid(quick, 256))
        tag = check_hypotheses(state)
        _, _, rep = evolve(state, T)
        rows.append(
            {
                "case": case,
                "matched": tag.case.value,
                "flagged": rep.flagged,
                "Hstar_obs": rep.Hstar_obs,
                "ok": tag.case is Hypothesis(case) and not rep.flagged and rep.Hstar_obs > 0,
            }
        )
    return {"passed": all(row["ok"] for row in rows), "cases": rows}


def _bump(A: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda r: A * (1.0 - r**2) ** 2


@criterion("comparison", "evolution", "ordered initial data stay ordered at every step")
def _comparison(quick: bool, rng: np.random.Generator) -> dict[str, Any]:
    T = 0.2 if quick else 2.0
    M = _grid(quick, 128)
    rows = []
    for b in (0.0, 3.0):
        params = FlowParams(N=2, alpha=1.0, b=b, k=1.0)
        base = quadratic_data(1.0).u
        for _ in range(2 if quick else 5):
            a1, a2 = rng.uniform(0.0, 0.05, 2)
            d = max(0.0, a1 - a2) + float(rng.uniform(0.0, 0.05))
            lower = init_state(lambda r, a=a1: base(r) + _bump(a)(r), params, M)
            upper = init_state(lambda r, a=a2, s=d: base(r) + _bump(a)(r) + s, params, M)
            report = comparison_check(lower, upper, T)
            rows.append({"b": b, "shift": d, "min_gap": report["min_gap"], "ok": report["ordered"]})
    return {"passed": all(row["ok"] for row in rows), "cases": rows}


@criterion("grid_convergence", "evolution", "second-order Richardson ratio under grid refinement")
def _grid_convergence(quick: bool, rng: np.random.Generator) -> dict[str, Any]:
    params = FlowParams(N=2, alpha=1.0, b=3.0, k=1.0)
    grids = (64, 128, 256) if quick else (128, 256, 512)
    T = 0.2 if quick else 1.0
    solutions = []
    for M in grids:
        state = init_state(quadratic_data(1.0), params, M)
        ref = reference_on_grid(params, state.r_grid)
        final, _, _ = evolve(state, T, reference=ref, sample_interval=T / 4)
        solutions.append(final.u)
    coarse_nodes = [u[:: (u.size - 1) // grids[0]] for u in solutions]
    centered = [u - np.mean(u) for u in coarse_nodes]
    ratio = refinement_ratio(*centered)
    return {"passed": 3.5 <= ratio <= 4.5, "grids": list(grids), "ratio": ratio}


__all__ = [
    "CRITERIA",
    "Criterion",
    "criterion",
    "format_table",
    "refinement_ratio",
    "run_suite",
    "select",
]
