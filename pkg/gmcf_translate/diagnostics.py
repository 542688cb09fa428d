"""Independent checks that turn the analytic properties into pass/fail signals.

Monitors are plain callables invoked with an evolution state; they record
into :class:`~gmcf_translate.models.IntersectionTrace` or an
:class:`EventLog` and never stop a run.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Sequence
from pathlib import Path
from typing import Any, TypedDict

import numpy as np

from gmcf_translate.core import FlowParams, signed_pow
from gmcf_translate.exceptions import GridMismatch, NotApplicable
from gmcf_translate.models import EstimateReport, IntersectionTrace
from gmcf_translate.profiles import (
    CROSS_CHECK_EPS,
    IntegratorOptions,
    attach_r_infinity,
    compare_profiles,
    integrate_psi_epsilon,
    integrate_zeta,
)

logger = logging.getLogger(__name__)

DEADBAND = 1e-12
GROWTH_TOL = 0.01
_SUP_KEYS = ("M0", "M1", "M2", "Vmax", "Hmax")
_INF_KEYS = ("Vmin", "Hmin")


class EventLog:
    """Structured monitor events, written as JSON lines."""

    def __init__(self) -> None:
        self.events: list[dict[str, Any]] = []

    def record(self, time: float, monitor: str, **payload: Any) -> None:
        """Append one event."""
        self.events.append({"time": float(time), "monitor": monitor, "payload": payload})

    def __len__(self) -> int:
        """Number of recorded events."""
        return len(self.events)

    def write(self, path: str | Path) -> Path:
        """Write the events to *path*, one JSON object per line."""
        path = Path(path)
        lines = [json.dumps(event, sort_keys=True) for event in self.events]
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return path


# -- oracle equivalence ------------------------------------------------------


class OracleReport(TypedDict):
    """Agreement of the singular profile with the regularized oracle."""

    c: float
    regime: str
    deviations: list[dict[str, Any]]
    monotone: bool


def oracle_equivalence(
    params: FlowParams,
    c: float,
    opts: IntegratorOptions | None = None,
    eps_values: Sequence[float] = CROSS_CHECK_EPS,
) -> OracleReport:
    """Compare the ``zeta``-form profile with ``eps``-regularized ones.

    Raises
    ------
    CrossCheckFailure
        If the deviations do not shrink with ``eps`` or the singular profile
        is not enclosed by the regularized ones.
    """
    opts = opts or IntegratorOptions()
    reference = attach_r_infinity(integrate_zeta(params, c, opts))
    oracle_opts = opts if reference.regime.blows_up else opts.replace(r_max=min(opts.r_max, opts.check_radius))
    candidates = [integrate_psi_epsilon(params, c, eps, oracle_opts) for eps in eps_values]
    report = compare_profiles(reference, candidates, opts)
    logger.info(
        "oracle c=%.12g: deviations %s",
        c,
        ", ".join(f"{row['eps']:g}:{row['max_deviation']:.2e}" for row in report["deviations"]),
    )
    return {"c": c, "regime": reference.regime.value, **report}


# -- intersection counting ---------------------------------------------------


def count_sign_changes(values: np.ndarray, scale: float = 1.0, deadband: float = DEADBAND) -> int:
    """Count strict sign changes, ignoring entries within ``deadband * scale`` of zero."""
    values = np.asarray(values, dtype=float)
    kept = values[np.abs(values) > deadband * max(scale, 1.0)]
    if kept.size < 2:
        return 0
    return int(np.count_nonzero(np.diff(np.sign(kept)) != 0))


class IntersectionMonitor:
    """Track sign changes of ``u - (Phi(.; c) + c t + d)`` for several shifts ``d``.

    Parameters
    ----------
    phi : numpy.ndarray
        ``Phi(.; c)`` at the evolution grid nodes.
    c : float
        Speed of the comparison family.
    shifts : sequence of float
        Vertical shifts ``d``.
    event_log : EventLog, optional
        Receives one event per count increase.
    """

    name = "intersection"

    def __init__(
        self, phi: np.ndarray, c: float, shifts: Sequence[float], event_log: EventLog | None = None
    ) -> None:
        self.phi = np.asarray(phi, dtype=float)
        self.c = c
        self.event_log = event_log
        self.trace = IntersectionTrace(c=c, shifts=[float(d) for d in shifts])
        self.trace.counts = {repr(float(d)): [] for d in shifts}

    def __call__(self, state: Any) -> None:
        """Record counts for the current state."""
        if state.u.shape != self.phi.shape:
            raise GridMismatch(f"state has {state.u.size} nodes, comparison profile {self.phi.size}")
        self.trace.times.append(float(state.t))
        for d in self.trace.shifts:
            w = state.u - (self.phi + self.c * state.t + d)
            scale = float(np.max(np.abs(state.u)))
            count = count_sign_changes(w, scale)
            history = self.trace.counts[repr(d)]
            if history and count > history[-1]:
                violation = {"time": float(state.t), "shift": d, "before": history[-1], "after": count}
                self.trace.violations.append(violation)
                logger.warning("intersection count increased %d -> %d at t=%.6g (d=%g)", history[-1], count, state.t, d)
                if self.event_log is not None:
                    self.event_log.record(state.t, self.name, shift=d, before=history[-1], after=count)
            history.append(count)


# -- uniform-in-time estimates -----------------------------------------------


def estimate_sample(
    t: float,
    u: np.ndarray,
    ur: np.ndarray,
    urr: np.ndarray,
    H: np.ndarray,
    ut: np.ndarray,
    c_tilde: float,
    k_sign: int,
) -> dict[str, float]:
    """Extrema of the bounded quantities at one time."""
    sH = (k_sign or 1) * H
    return {
        "t": float(t),
        "M0": float(np.max(np.abs(u - c_tilde * t))),
        "M1": float(np.max(np.abs(ur))),
        "M2": float(np.max(np.abs(urr))),
        "Vmin": float(np.min(ut)),
        "Vmax": float(np.max(ut)),
        "Hmin": float(np.min(sH)),
        "Hmax": float(np.max(sH)),
    }


def _growth(early: float, full: float, upward: bool) -> float:
    base = max(abs(early), 1e-300)
    return (full - early) / base if upward else (early - full) / base


def assemble_report(
    samples: Sequence[dict[str, float]],
    split: float | None = None,
    growth_tol: float = GROWTH_TOL,
) -> EstimateReport:
    """Collect observed extrema and flag growth between time windows.

    Parameters
    ----------
    samples : sequence of dict
        Output of :func:`estimate_sample`, ordered in time.
    split : float, optional
        End of the early window; half the final time by default.
    growth_tol : float
        Relative growth above which a quantity is flagged.

    Raises
    ------
    ValueError
        If the samples do not cover two disjoint windows.
    """
    if not samples:
        raise ValueError("at least one sample is required")
    t0, t1 = samples[0]["t"], samples[-1]["t"]
    split = 0.5 * (t0 + t1) if split is None else split
    early = [s for s in samples if s["t"] <= split]
    late = [s for s in samples if s["t"] > split]
    if not early or not late:
        raise ValueError(f"samples on [{t0}, {t1}] do not cover two disjoint windows split at {split}")

    def extreme(group: Sequence[dict[str, float]], key: str) -> float:
        values = [s[key] for s in group]
        return max(values) if key in _SUP_KEYS else min(values)

    growth: dict[str, float] = {}
    for key in _SUP_KEYS + _INF_KEYS:
        growth[key] = _growth(extreme(early, key), extreme(samples, key), key in _SUP_KEYS)
    flagged = sorted(key for key, g in growth.items() if g > growth_tol)
    if flagged:
        logger.warning("growth beyond %.0f%% between windows: %s", 100 * growth_tol, flagged)
    return EstimateReport(
        M0_obs=extreme(samples, "M0"),
        M1_obs=extreme(samples, "M1"),
        M2_obs=extreme(samples, "M2"),
        Vstar_obs=extreme(samples, "Vmin"),
        Vsup_obs=extreme(samples, "Vmax"),
        Hstar_obs=extreme(samples, "Hmin"),
        Hsup_obs=extreme(samples, "Hmax"),
        windows=[[t0, split], [split, t1]],
        growth=growth,
        flagged=flagged,
    )


def initial_velocity_bounds(params: FlowParams, ur: np.ndarray, H: np.ndarray, ut: np.ndarray) -> dict[str, float]:
    """A priori bounds implied by the initial data for ``b <= 0``.

    ``V_* = min H^alpha + b``, ``V^* = (max H^alpha + b) xi_0``,
    ``H_* = (V_*/xi - b)^{1/alpha}``, ``H^* = (V^* - b)^{1/alpha}`` with
    ``xi_0 = sqrt(1 + max u_r^2)`` and ``xi = sqrt(1 + M_1^2)``; also the
    maximum-principle range of ``u_t``.
    """
    if params.b > 0:
        raise NotApplicable("the initial-data bounds on H hold for b <= 0")
    if np.any(H <= 0):
        raise NotApplicable("initial curvature must be positive")
    spec = params.power_spec
    H_alpha = signed_pow(H, params.alpha, spec)
    xi_init = math.sqrt(1.0 + float(np.max(np.abs(ur))) ** 2)
    k = float(params.k) if params.k is not None else 0.0
    xi_bound = math.sqrt(1.0 + max(float(np.max(np.abs(ur))), abs(k)) ** 2)
    v_low = float(np.min(H_alpha)) + params.b
    v_high = (float(np.max(H_alpha)) + params.b) * xi_init
    return {
        "V_star": v_low,
        "V_sup": v_high,
        "H_star": float(params.root(v_low / xi_bound - params.b)),
        "H_sup": float(params.root(v_high - params.b)),
        "ut_min": float(np.min(ut)),
        "ut_max": float(np.max(ut)),
    }


# -- b > 0, k > 0 -----------------------------------------------------------


def curvature_floor(
    params: FlowParams,
    c_tilde: float,
    r_grid: np.ndarray,
    opts: IntegratorOptions | None = None,
) -> tuple[float, np.ndarray]:
    """Uniform curvature floor for ``b > 0 < k`` and the auxiliary slope.

    Uses the profile at ``c_1 = b + (c~ - b)/2``:
    ``H_* = (N - 1)/sqrt(1 + k^2) min Phi_1'(r)/r``.

    Returns
    -------
    H_floor : float
        The floor ``H_*``.
    phi1_prime : numpy.ndarray
        ``Phi_1'`` at the grid nodes.
    """
    k = params.k
    if not (params.b > 0 and k is not None and float(k) > 0):
        raise NotApplicable("the curvature floor is stated for b > 0 and k > 0")
    c1 = params.b + 0.5 * (c_tilde - params.b)
    opts = (opts or IntegratorOptions()).replace(r_max=float(r_grid[-1]))
    profile = integrate_zeta(params, c1, opts)
    slope = np.asarray(profile.psi_at(r_grid), dtype=float)
    ratio = np.empty_like(slope)
    ratio[1:] = slope[1:] / r_grid[1:]
    ratio[0] = profile.psi_prime_at(0.0)
    floor = (params.N - 1) / math.sqrt(1.0 + float(k) ** 2) * float(np.min(ratio))
    return floor, slope


class CaseCMonitor:
    """Steepness, convexity and curvature-floor monitor for ``b > 0 < k``.

    Parameters
    ----------
    floor : float
        Curvature floor ``H_*`` from :func:`curvature_floor`.
    phi1_prime : numpy.ndarray
        Auxiliary slope ``Phi_1'`` at the grid nodes.
    event_log : EventLog, optional
        Receives one event per violated property.
    slack : float
        Relative tolerance for the floor and the ordering checks.
    """

    name = "case_c"

    def __init__(
        self, floor: float, phi1_prime: np.ndarray, event_log: EventLog | None = None, slack: float = 1e-6
    ) -> None:
        self.floor = floor
        self.phi1_prime = np.asarray(phi1_prime, dtype=float)
        self.event_log = event_log
        self.slack = slack
        self.violations: list[dict[str, Any]] = []

    def __call__(self, state: Any) -> None:
        """Check the three properties on the interior nodes."""
        interior = slice(1, -1)
        checks = {
            "steepness": float(np.min(state.ur[interior] - self.phi1_prime[interior])),
            "convexity": float(np.min(state.urr)),
            "floor": float(np.min(state.H) - self.floor * (1.0 - self.slack)),
            "axis": float(state.urr[0]),
        }
        scale = self.slack * max(1.0, float(np.max(np.abs(state.urr))))
        for name, margin in checks.items():
            if margin < -scale or (name == "axis" and margin <= 0):
                self.violations.append({"time": float(state.t), "check": name, "margin": margin})
                logger.warning("%s check failed at t=%.6g (margin %.3e)", name, state.t, margin)
                if self.event_log is not None:
                    self.event_log.record(state.t, self.name, check=name, margin=margin)
