"""Method-of-lines evolution of the radial Neumann problem.

``u_t = (H^alpha + b) sqrt(1 + u_r^2)`` on ``[0, 1]`` with ``u_r(0) = 0`` and
``u_r(1) = k``. Second-order central differences in space with ghost nodes
for both boundary conditions, Heun's method (RK2) in time.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from scipy.interpolate import CubicSpline

from gmcf_translate.core import FlowParams, InfiniteSlope, curvature_radial, signed_pow, slope_sign
from gmcf_translate.diagnostics import assemble_report, estimate_sample
from gmcf_translate.exceptions import (
    CFLViolation,
    CompatibilityError,
    DomainError,
    GridMismatch,
    NonFinite,
    RegimeError,
    SignLoss,
)
from gmcf_translate.models import ConvergenceRecord, EstimateReport, TravelingReference
from gmcf_translate.profiles import IntegratorOptions, ProfileSolution

logger = logging.getLogger(__name__)

MIN_NODES = 64
CFL = 0.2
SIGN_LOSS_RATIO = 1e-8

Field = Callable[[np.ndarray], np.ndarray]
Observer = Callable[["EvolutionState"], None]


# -- initial data ------------------------------------------------------------


@dataclass(frozen=True)
class InitialData:
    """Initial height ``u_0`` with optional analytic derivatives.

    Parameters
    ----------
    u : callable
        ``u_0(r)`` for an array of radii.
    du, d2u : callable, optional
        ``u_0'`` and ``u_0''``; hypotheses on ``u_0''`` use them at the
        nodes instead of second differences.
    label : str
        Preset name recorded in outputs.
    """

    u: Field
    du: Field | None = None
    d2u: Field | None = None
    label: str = "custom"

    @classmethod
    def from_samples(cls, r: Sequence[float], u: Sequence[float], label: str = "samples") -> InitialData:
        """Interpolate dense samples with a cubic spline.

        Raises
        ------
        ValueError
            If the samples do not cover ``[0, 1]`` with increasing radii.
        """
        r = np.asarray(r, dtype=float)
        u = np.asarray(u, dtype=float)
        if r.ndim != 1 or r.shape != u.shape or r.size < 4:
            raise ValueError(f"need matching 1-D samples with at least 4 nodes, got {r.shape} and {u.shape}")
        if np.any(np.diff(r) <= 0):
            raise ValueError("sample radii must be strictly increasing")
        if r[0] > 0 or r[-1] < 1:
            raise ValueError(f"samples must cover [0, 1], got [{r[0]}, {r[-1]}]")
        spline = CubicSpline(r, u)
        return cls(u=spline, du=spline.derivative(1), d2u=spline.derivative(2), label=label)


def quadratic_data(k: float) -> InitialData:
    """``u_0 = k r^2 / 2``, compatible with the slope ``k``."""
    return InitialData(
        u=lambda r: 0.5 * k * r**2,
        du=lambda r: k * r,
        d2u=lambda r: np.full_like(r, k, dtype=float),
        label="quadratic",
    )


def sphere_cap_data(radius: float = 2.0) -> InitialData:
    """Lower spherical cap ``u_0 = R - sqrt(R^2 - r^2)`` with ``R > 1``."""
    if not radius > 1:
        raise ValueError(f"radius must be > 1, got {radius}")
    R2 = radius * radius
    return InitialData(
        u=lambda r: radius - np.sqrt(R2 - r**2),
        du=lambda r: r / np.sqrt(R2 - r**2),
        d2u=lambda r: R2 / (R2 - r**2) ** 1.5,
        label="sphere-cap",
    )


def profile_data(profile: ProfileSolution) -> InitialData:
    """Translating profile as initial data."""
    return InitialData(u=profile.phi_at, du=profile.psi_at, d2u=profile.psi_prime_at, label="ts")


def perturbed_profile_data(profile: ProfileSolution, amplitude: float = 0.1) -> InitialData:
    """Translating profile plus ``A (1 - r^2)^2``.

    The bump has zero slope at both ends, so compatibility is kept.
    """
    A = amplitude
    return InitialData(
        u=lambda r: profile.phi_at(r) + A * (1.0 - r**2) ** 2,
        du=lambda r: profile.psi_at(r) - 4.0 * A * r * (1.0 - r**2),
        d2u=lambda r: profile.psi_prime_at(r) - 4.0 * A * (1.0 - 3.0 * r**2),
        label="perturbed-ts",
    )


# -- state -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EvolutionState:
    """Nodal solution on the uniform grid ``0 = r_0 < ... < r_M = 1``.

    Parameters
    ----------
    params : FlowParams
        Flow parameters with a finite ``k``.
    r_grid : numpy.ndarray
        Grid nodes.
    u : numpy.ndarray
        Heights at the nodes.
    t : float
        Current time.
    ur, urr, H : numpy.ndarray
        Discrete derivatives and curvature matching ``u``.
    step_count : int
        Accepted steps since the initial state.
    initial : InitialData | None
        Source of the initial state.
    """

    params: FlowParams
    r_grid: np.ndarray
    u: np.ndarray
    t: float
    ur: np.ndarray
    urr: np.ndarray
    H: np.ndarray
    step_count: int = 0
    initial: InitialData | None = field(default=None, repr=False)

    @property
    def dr(self) -> float:
        """Grid spacing."""
        return float(self.r_grid[1] - self.r_grid[0])

    @property
    def M(self) -> int:
        """Number of grid intervals."""
        return self.r_grid.size - 1

    @property
    def ut(self) -> np.ndarray:
        """Right-hand side ``(H^alpha + b) sqrt(1 + u_r^2)`` at the nodes."""
        return velocity(self.params, self.ur, self.H)

    def with_height(self, u: np.ndarray, t: float, step_count: int | None = None) -> EvolutionState:
        """Return a state with new heights and refreshed caches."""
        ur, urr, H = discrete_fields(u, self.dr, float(self.params.k), self.params.N)
        return dataclasses.replace(
            self,
            u=u,
            t=t,
            ur=ur,
            urr=urr,
            H=H,
            step_count=self.step_count if step_count is None else step_count,
        )


def discrete_fields(u: np.ndarray, dr: float, k: float, N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Central differences with ghost nodes ``u_{-1} = u_1`` and ``u_{M+1} = u_{M-1} + 2 dr k``."""
    padded = np.empty(u.size + 2)
    padded[1:-1] = u
    padded[0] = u[1]
    padded[-1] = u[-2] + 2.0 * dr * k
    ur = (padded[2:] - padded[:-2]) / (2.0 * dr)
    ur[0] = 0.0
    ur[-1] = k
    urr = (padded[2:] - 2.0 * u + padded[:-2]) / (dr * dr)
    r = np.arange(u.size) * dr
    H = curvature_radial(r, ur, urr, N)
    return ur, urr, H


def velocity(params: FlowParams, ur: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Normal-velocity right-hand side ``(H^alpha + b) sqrt(1 + u_r^2)``."""
    H_alpha = H if params.alpha == 1 else signed_pow(H, params.alpha, params.power_spec)
    return (H_alpha + params.b) * np.sqrt(1.0 + ur**2)


def _finite_k(params: FlowParams) -> float:
    if params.k is None or isinstance(params.k, InfiniteSlope):
        raise DomainError(f"evolution needs a finite boundary slope, got k={params.k}")
    return float(params.k)


def init_state(u0: InitialData | Field | np.ndarray, params: FlowParams, M: int = 256) -> EvolutionState:
    """Sample the initial data on ``M + 1`` nodes and verify compatibility.

    Parameters
    ----------
    u0 : InitialData, callable or numpy.ndarray
        Initial height; an array must hold ``M + 1`` nodal values.
    params : FlowParams
        Flow parameters with a finite ``k``.
    M : int
        Number of grid intervals (``M >= 64``).

    Raises
    ------
    CompatibilityError
        If ``u_0'(0) = 0`` or ``u_0'(1) = k`` fails beyond ``O(dr)``.
    """
    k = _finite_k(params)
    if M < MIN_NODES:
        raise DomainError(f"M must be >= {MIN_NODES}, got {M}")
    r = np.linspace(0.0, 1.0, M + 1)
    dr = 1.0 / M
    if isinstance(u0, np.ndarray):
        if u0.shape != r.shape:
            raise GridMismatch(f"expected {M + 1} nodal values, got {u0.shape}")
        data = None
        u = np.array(u0, dtype=float)
    else:
        data = u0 if isinstance(u0, InitialData) else InitialData(u=u0)
        u = np.asarray(data.u(r), dtype=float)
    if not np.all(np.isfinite(u)):
        raise NonFinite("initial data is not finite on [0, 1]")

    curvature = np.abs(np.diff(u, 2)).max() / (dr * dr)
    tol = 2.0 * dr * (1.0 + curvature)
    left = (u[1] - u[0]) / dr
    right = (u[-1] - u[-2]) / dr
    if abs(left) > tol:
        raise CompatibilityError(f"u0'(0) = 0 violated: one-sided slope {left:.6g} (tolerance {tol:.3g})")
    if abs(right - k) > tol:
        raise CompatibilityError(f"u0'(1) = k = {k} violated: one-sided slope {right:.6g} (tolerance {tol:.3g})")

    ur, urr, H = discrete_fields(u, dr, k, params.N)
    return EvolutionState(params=params, r_grid=r, u=u, t=0.0, ur=ur, urr=urr, H=H, initial=data)


# -- hypotheses --------------------------------------------------------------


class Hypothesis(str, Enum):
    """Initial-data case under which global existence and convergence hold."""

    A = "A"
    B = "B"
    C = "C"
    D = "D"
    NONE = "NONE"


@dataclass(frozen=True)
class HypothesisTag:
    """Matched case with the inequalities that witnessed it."""

    case: Hypothesis
    witnessed: tuple[str, ...] = ()


def _second_derivative(state: EvolutionState) -> np.ndarray:
    if state.initial is not None and state.initial.d2u is not None:
        return np.asarray(state.initial.d2u(state.r_grid), dtype=float)
    return state.urr


def check_hypotheses(state: EvolutionState) -> HypothesisTag:
    """Return the first initial-data case satisfied grid-wise, or ``NONE``."""
    params = state.params
    b, N = params.b, params.N
    k = _finite_k(params)
    H = state.H
    h_min, h_max = float(np.min(H)), float(np.max(H))
    if b == 0 and k > 0 and h_min > 0:
        return HypothesisTag(Hypothesis.A, ("b = 0 < k", f"min H(., 0) = {h_min:.6g} > 0"))
    if b < 0 < k and h_min > 0:
        lhs = params.root(-b) * math.sqrt(1.0 + k * k)
        forcing = float(np.min(signed_pow(H, params.alpha, params.power_spec))) + b
        if lhs < k * N and forcing > 0:
            return HypothesisTag(
                Hypothesis.B,
                (f"(-b)^(1/alpha) sqrt(1+k^2) = {lhs:.6g} < kN = {k * N:.6g}", f"min H^alpha + b = {forcing:.6g} > 0"),
            )
    d2u = _second_derivative(state)
    if b > 0 < k and float(np.min(d2u)) > 0:
        return HypothesisTag(Hypothesis.C, ("b > 0 and k > 0", f"min u0'' = {float(np.min(d2u)):.6g} > 0"))
    if b > 0 > k and params.alpha_odd is not None and float(np.max(d2u)) < 0 and h_max < 0:
        forcing = float(np.min(signed_pow(H, params.alpha, params.power_spec))) + b
        if forcing > 0:
            return HypothesisTag(
                Hypothesis.D,
                ("b > 0 > k", f"max u0'' = {float(np.max(d2u)):.6g} < 0", f"min H^alpha + b = {forcing:.6g} > 0"),
            )
    return HypothesisTag(Hypothesis.NONE)


# -- stepping ----------------------------------------------------------------


def stability_bound(state: EvolutionState, cfl: float = CFL) -> float:
    """Largest stable explicit step ``cfl dr^2 min(xi^2 / (alpha |H|^{alpha-1}))``.

    The axis node carries ``H = N u_rr``, hence the extra factor ``min(1, 2/N)``.

    Raises
    ------
    DomainError
        If ``alpha < 1`` and ``H = 0`` at a node, where the diffusion is singular.
    """
    alpha = state.params.alpha
    xi2 = 1.0 + state.ur**2
    with np.errstate(divide="ignore", invalid="ignore"):
        diffusion = alpha * np.abs(state.H) ** (alpha - 1.0) / xi2
    peak = float(np.max(diffusion))
    if math.isinf(peak):
        node = int(np.argmax(diffusion))
        raise DomainError(
            f"degenerate diffusion alpha |H|^(alpha-1) is singular for alpha={alpha} where H = 0 (node {node})"
        )
    if math.isnan(peak):
        return 0.0
    if peak == 0:
        return math.inf
    return cfl * state.dr**2 / peak * min(1.0, 2.0 / state.params.N)


def _check_sign(H: np.ndarray, k_sign: int, t: float) -> None:
    if not np.all(np.isfinite(H)):
        raise NonFinite(f"curvature not finite at t={t:.6g}")
    if k_sign == 0:
        return
    sH = k_sign * H
    h_abs = np.abs(H)
    if np.any(sH <= 0) or float(np.min(h_abs)) < SIGN_LOSS_RATIO * float(np.max(h_abs)):
        worst = int(np.argmin(sH))
        raise SignLoss(f"curvature lost its sign at t={t:.6g}, node {worst} (H={H[worst]:.3e})")


def _rhs(state: EvolutionState, k_sign: int) -> np.ndarray:
    _check_sign(state.H, k_sign, state.t)
    try:
        ut = state.ut
    except DomainError as exc:
        if k_sign:
            raise SignLoss(str(exc)) from exc
        raise
    if not np.all(np.isfinite(ut)):
        raise NonFinite(f"velocity not finite at t={state.t:.6g}")
    return ut


def step(state: EvolutionState, dt: float, cfl: float = CFL) -> EvolutionState:
    """Advance one Heun step.

    Raises
    ------
    CFLViolation
        If ``dt`` exceeds :func:`stability_bound`.
    SignLoss
        If the curvature loses its strict sign (``k != 0``).
    NonFinite
        On overflow.
    """
    bound = stability_bound(state, cfl)
    if not (0 < dt <= bound * (1.0 + 1e-12)):
        raise CFLViolation(f"dt={dt:.3e} outside (0, {bound:.3e}] at t={state.t:.6g}")
    k_sign = slope_sign(state.params.k)
    v1 = _rhs(state, k_sign)
    trial = state.with_height(state.u + dt * v1, state.t + dt)
    v2 = _rhs(trial, k_sign)
    u_new = state.u + 0.5 * dt * (v1 + v2)
    if not np.all(np.isfinite(u_new)):
        raise NonFinite(f"height not finite at t={state.t + dt:.6g}")
    new = state.with_height(u_new, state.t + dt, state.step_count + 1)
    _check_sign(new.H, k_sign, new.t)
    return new


# -- convergence -------------------------------------------------------------


def reference_on_grid(
    params: FlowParams, r_grid: np.ndarray, tol: float = 1e-10, opts: IntegratorOptions | None = None
) -> TravelingReference:
    """Sample the translating solution for ``params.k`` on *r_grid*."""
    from gmcf_translate.speed import translating_solution

    c_tilde, profile = translating_solution(params, tol=tol, opts=opts)
    phi = np.asarray(profile.phi_at(r_grid), dtype=float)
    if np.any(np.isnan(phi)):
        raise GridMismatch(f"translating profile ends at r={profile.r_end:.12g}, before the grid end")
    return TravelingReference(c_tilde=c_tilde, phi=phi)


def convergence_metric(state: EvolutionState, ref: TravelingReference) -> tuple[float, float]:
    """Return ``(sup |w|, max w - min w)`` for ``w = u - Phi~ - c~ t``."""
    if ref.phi.shape != state.u.shape:
        raise GridMismatch(f"state has {state.u.size} nodes, reference {ref.phi.size}")
    w = state.u - ref.phi - ref.c_tilde * state.t
    return float(np.max(np.abs(w))), float(np.max(w) - np.min(w))


def _record(record: ConvergenceRecord, state: EvolutionState, ref: TravelingReference) -> None:
    raw, osc = convergence_metric(state, ref)
    w = state.u - ref.phi - ref.c_tilde * state.t
    offset = float(np.mean(w))
    axis = float(state.u[0])
    if record.times:
        speed = (axis - record.axis_height[-1]) / (state.t - record.times[-1])
    else:
        speed = float(state.ut[0])
    record.append(float(state.t), raw, osc, float(np.max(np.abs(w - offset))), offset, speed, axis)


def _next_sample(t: float, interval: float, T_final: float) -> float:
    # within rounding of T_final counts as T_final
    nxt = t + interval
    return T_final if nxt >= T_final - 1e-9 * interval else nxt


def evolve(
    state: EvolutionState,
    T_final: float,
    observers: Sequence[Observer] = (),
    reference: TravelingReference | None = None,
    sample_interval: float | None = None,
    dt: float | None = None,
    cfl: float = CFL,
    allow_unverified: bool = False,
    snapshots: list[EvolutionState] | None = None,
) -> tuple[EvolutionState, ConvergenceRecord, EstimateReport]:
    """Evolve until ``T_final``, sampling diagnostics at a fixed cadence.

    Parameters
    ----------
    state : EvolutionState
        Initial state.
    T_final : float
        Final time.
    observers : sequence of callable
        Called with the state at every sample time.
    reference : TravelingReference, optional
        Translating solution on the grid; computed from ``params.k`` when omitted.
    sample_interval : float, optional
        Time between samples, ``T_final / 100`` by default.
    dt : float, optional
        Fixed step; the stability bound is used when omitted.
    cfl : float
        Courant factor of the stability bound.
    allow_unverified : bool
        Continue with a warning when no initial-data case matches.
    snapshots : list, optional
        Receives the state at every sample time.

    Returns
    -------
    tuple[EvolutionState, ConvergenceRecord, EstimateReport]

    Raises
    ------
    RegimeError
        If no initial-data case matches and *allow_unverified* is false.
    SignLoss, NonFinite, CFLViolation
        Propagated from :func:`step`.
    """
    if not T_final > state.t:
        raise ValueError(f"T_final must exceed the current time {state.t}, got {T_final}")
    tag = check_hypotheses(state)
    if tag.case is Hypothesis.NONE:
        if not allow_unverified:
            raise RegimeError("initial data satisfies none of the cases A-D")
        logger.warning("initial data satisfies none of the cases A-D; continuing")
    if reference is None:
        reference = reference_on_grid(state.params, state.r_grid)
    interval = sample_interval or (T_final - state.t) / 100.0
    k_sign = slope_sign(state.params.k)
    logger.info(
        "evolve case %s from t=%g to %g on %d intervals (c~=%.12g)",
        tag.case.value,
        state.t,
        T_final,
        state.M,
        reference.c_tilde,
    )

    record = ConvergenceRecord()
    samples: list[dict[str, float]] = []

    def sample(s: EvolutionState) -> None:
        _record(record, s, reference)
        samples.append(estimate_sample(s.t, s.u, s.ur, s.urr, s.H, s.ut, reference.c_tilde, k_sign))
        for observer in observers:
            observer(s)
        if snapshots is not None:
            snapshots.append(s)

    sample(state)
    next_sample = _next_sample(state.t, interval, T_final)
    while state.t < T_final:
        step_dt = dt if dt is not None else stability_bound(state, cfl)
        remaining = next_sample - state.t
        if step_dt >= remaining * (1.0 - 1e-12):
            state = step(state, remaining, cfl)
            state = dataclasses.replace(state, t=next_sample)
            sample(state)
            logger.debug("t=%.6g steps=%d oscillation=%.3e", state.t, state.step_count, record.oscillation[-1])
            next_sample = _next_sample(next_sample, interval, T_final)
        else:
            state = step(state, step_dt, cfl)

    report = assemble_report(samples)
    logger.info(
        "evolve done after %d steps: oscillation %.3e, front speed %.12g",
        state.step_count,
        record.oscillation[-1],
        record.front_speed[-1],
    )
    return state, record, report


def comparison_check(
    lower: EvolutionState, upper: EvolutionState, T_final: float, cfl: float = CFL, slack: float = 1e-12
) -> dict[str, Any]:
    """Evolve two ordered states with shared steps and report whether the order persists.

    Raises
    ------
    GridMismatch
        If the states live on different grids.
    """
    if lower.u.shape != upper.u.shape:
        raise GridMismatch(f"grids differ: {lower.u.size} and {upper.u.size} nodes")
    min_gap = float(np.min(upper.u - lower.u))
    first_violation = None
    steps = 0
    while lower.t < T_final:
        dt = min(stability_bound(lower, cfl), stability_bound(upper, cfl), T_final - lower.t)
        lower = step(lower, dt, cfl)
        upper = step(upper, dt, cfl)
        steps += 1
        gap = upper.u - lower.u
        worst = int(np.argmin(gap))
        min_gap = min(min_gap, float(gap[worst]))
        if first_violation is None and gap[worst] < -slack * max(1.0, float(np.max(np.abs(upper.u)))):
            first_violation = {"time": float(lower.t), "radius": float(lower.r_grid[worst]), "gap": float(gap[worst])}
            logger.warning("ordering lost at t=%.6g, r=%.6g", lower.t, lower.r_grid[worst])
    return {"steps": steps, "min_gap": min_gap, "ordered": first_violation is None, "violation": first_violation}
