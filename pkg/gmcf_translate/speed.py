"""Selection of the unique translating solution in the unit cylinder.

For an admissible ``(b, k)`` the speed ``c~`` solves ``Psi(1; c, b) = k``
(or ``R_inf(c, b) = 1`` for a vertical boundary slope). ``Psi(1; c, b)`` is
strictly increasing in ``c``, so a bracket plus bisection finds ``c~``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, TypedDict

from gmcf_translate.core import FlowParams, InfiniteSlope, RegimeTag, Slope, slope_sign
from gmcf_translate.exceptions import BracketFailure, DomainError, NonConvergence, NonMonotone, RegimeError
from gmcf_translate.profiles import (
    IntegratorOptions,
    ProfileIntegrator,
    ProfileSolution,
    ZetaIntegrator,
    estimate_r_infinity,
    flat_solution,
)

logger = logging.getLogger(__name__)

CASE_TAGS = ("a", "b", "c", "d")
SECANT_WINDOW = 1e-3
MAX_MARCH = 60
MAX_ITER = 400
# radius up to which infinite-slope residuals integrate; beyond it only the sign matters
_VERTICAL_RADIUS = 2.0


class AdmissibilityResult(TypedDict):
    """Decision on whether a translating solution exists.

    Parameters
    ----------
    admissible : bool
        Whether a translating solution exists for ``(b, k)``.
    case : str | None
        One of ``"a"``, ``"b"``, ``"c"``, ``"d"`` when admissible.
    reason : str
        The inequality that decided the outcome.
    """

    admissible: bool
    case: str | None
    reason: str


@dataclass
class SpeedResult:
    """Outcome of speed selection.

    Parameters
    ----------
    params : FlowParams
        Flow parameters (``k`` set).
    c_tilde : float
        Selected speed.
    case_tag : str
        Admissibility case.
    profile : ProfileSolution
        Profile at ``c_tilde`` on ``[0, 1]``.
    residual : float
        ``Psi(1; c~) - k``, or ``R_inf(c~) - 1`` for infinite ``k``.
    bracket_history : list[tuple[float, float, float]]
        ``(c_lo, c_hi, Psi(1; c_mid))`` per iteration.
    iterations : int
        Number of residual evaluations inside the bracket.
    """

    params: FlowParams
    c_tilde: float
    case_tag: str
    profile: ProfileSolution
    residual: float
    bracket_history: list[tuple[float, float, float]] = field(default_factory=list)
    iterations: int = 0

    def __post_init__(self) -> None:
        """Validate the case tag."""
        if self.case_tag not in CASE_TAGS:
            raise ValueError(f"case_tag must be one of {CASE_TAGS}, got {self.case_tag!r}")


def _resolve_k(params: FlowParams, k: Slope | None) -> Slope:
    if k is None:
        k = params.k
    if k is None:
        raise DomainError("a boundary slope k is required")
    return k


def _is_flat(params: FlowParams, k: Slope) -> bool:
    return params.b > 0 and not isinstance(k, InfiniteSlope) and k == 0 and params.alpha == 1


def admissibility(params: FlowParams, k: Slope | None = None) -> AdmissibilityResult:
    """Decide whether a translating solution with boundary slope *k* exists.

    Rejection is returned as a value, never raised.
    """
    k = _resolve_k(params, k)
    b, N = params.b, params.N
    s = slope_sign(k)
    infinite = isinstance(k, InfiniteSlope)
    if b == 0:
        if s > 0 and not infinite:
            return {"admissible": True, "case": "a", "reason": "b = 0 < k"}
        return {"admissible": False, "case": None, "reason": "b = 0 needs a finite k > 0"}
    if b < 0:
        if s <= 0:
            return {"admissible": False, "case": None, "reason": "b < 0 needs k > 0"}
        root = params.root(-b)
        if infinite:
            # R_inf(c) decreases from N (-b)^(-1/alpha) towards (N - 1) (-b)^(-1/alpha)
            ok = N - 1 < root < N
            if root >= N:
                text = f"(-b)^(1/alpha) = {root:.12g} >= N = {N}"
            elif not ok:
                text = (
                    f"(-b)^(1/alpha) = {root:.12g} <= N - 1 = {N - 1}: maximal radii stay above "
                    f"(N - 1)(-b)^(-1/alpha) = {(N - 1) / root:.12g} >= 1"
                )
            else:
                text = f"N - 1 = {N - 1} < (-b)^(1/alpha) = {root:.12g} < N = {N}"
        else:
            lhs = root * math.sqrt(1.0 + k * k)
            ok = lhs < k * N
            text = f"(-b)^(1/alpha) sqrt(1+k^2) = {lhs:.12g} {'<' if ok else '>='} kN = {k * N:.12g}"
        return {"admissible": ok, "case": "b" if ok else None, "reason": text}
    if s > 0:
        if infinite:
            return {"admissible": False, "case": None, "reason": "b > 0 needs a finite k > 0"}
        return {"admissible": True, "case": "c", "reason": "b > 0 and k > 0"}
    if s == 0:
        if params.alpha == 1:
            return {"admissible": True, "case": "c", "reason": "b > 0, k = 0, alpha = 1: flat translating solution"}
        return {"admissible": False, "case": None, "reason": "b > 0 = k is degenerate unless alpha = 1"}
    if params.alpha_odd is None:
        return {"admissible": False, "case": None, "reason": "b > 0 > k requires an odd-rational alpha"}
    root = params.root(b)
    if infinite:
        ok = root > N
        text = f"b^(1/alpha) = {root:.12g} {'>' if ok else '<='} N = {N}"
    else:
        lhs = root * math.sqrt(1.0 + k * k)
        ok = lhs > -k * N
        text = f"b^(1/alpha) sqrt(1+k^2) = {lhs:.12g} {'>' if ok else '<='} -kN = {-k * N:.12g}"
    return {"admissible": ok, "case": "d" if ok else None, "reason": text}


def _require_case(params: FlowParams, k: Slope) -> str:
    decision = admissibility(params, k)
    if not decision["admissible"]:
        raise RegimeError(f"no translating solution for b={params.b}, k={k}: {decision['reason']}")
    return decision["case"]


class _Residual:
    """Residual ``g(c)``, increasing in ``c``, whose root is the selected speed."""

    def __init__(self, params: FlowParams, k: Slope, opts: IntegratorOptions, integrator: ProfileIntegrator) -> None:
        self.params = params
        self.k = k
        self.infinite = isinstance(k, InfiniteSlope)
        self.integrator = integrator
        self.opts = opts.replace(r_max=_VERTICAL_RADIUS if self.infinite else 1.0)
        self.calls = 0

    def profile(self, c: float) -> ProfileSolution:
        self.calls += 1
        return self.integrator(self.params, c, self.opts)

    def __call__(self, c: float) -> tuple[float, float, ProfileSolution]:
        """Return ``(g(c), Psi(1; c), profile)``."""
        sol = self.profile(c)
        psi_one = psi_at_one(sol)
        if not self.infinite:
            return psi_one - self.k, psi_one, sol
        r_inf = _r_infinity_or_lower(sol)
        # R_inf is decreasing in c for b < 0 and increasing for b > c > 0
        g = 1.0 - r_inf if self.k is InfiniteSlope.POS else r_inf - 1.0
        return g, psi_one, sol


def psi_at_one(sol: ProfileSolution) -> float:
    """Boundary slope ``Psi(1)``, signed infinity when the profile blows up before ``r = 1``."""
    if sol.reached_cutoff and sol.r_end <= 1.0:
        return math.copysign(math.inf, sol.zeta[-1])
    return float(sol.psi_at(1.0))


def _r_infinity_or_lower(sol: ProfileSolution) -> float:
    """Maximal radius, or the last integrated radius as a lower bound."""
    if sol.regime is RegimeTag.C_EQ_B:
        return math.inf
    if sol.reached_cutoff:
        return estimate_r_infinity(sol)[0]
    return sol.r_end


def bracket_speed(
    params: FlowParams,
    k: Slope | None = None,
    opts: IntegratorOptions | None = None,
    integrator: ProfileIntegrator | None = None,
    max_march: int = MAX_MARCH,
) -> tuple[float, float]:
    """Return ``(c_lo, c_hi)`` with ``Psi(1; c_lo) < k < Psi(1; c_hi)``.

    Raises
    ------
    RegimeError
        If ``(b, k)`` is not admissible.
    BracketFailure
        If a geometric march does not close the bracket.
    """
    k = _resolve_k(params, k)
    case = _require_case(params, k)
    residual = _Residual(params, k, opts or IntegratorOptions(), integrator or ZetaIntegrator())
    lo, hi, _, _ = _bracket(params, k, case, residual, max_march)
    return lo, hi


def _bracket(
    params: FlowParams, k: Slope, case: str, residual: _Residual, max_march: int
) -> tuple[float, float, float, float]:
    N, b = params.N, params.b
    if case == "a":
        return _confirm(residual, 0.0, N**params.alpha * math.sqrt(1.0 + k * k))
    if case == "c":
        return _confirm(residual, b, (N**params.alpha + b) * math.sqrt(1.0 + k * k))
    if case == "b":
        g_lo = residual(0.0)[0]
        c_hi = max(1.0, -b)
        for _ in range(max_march):
            g_hi = residual(c_hi)[0]
            if g_hi > 0:
                return 0.0, c_hi, g_lo, g_hi
            c_hi *= 2.0
        raise BracketFailure(f"no upper speed found up to c={c_hi / 2:.6g}")
    # case d: Psi(1; b) = 0 > k, march the lower end down towards 0
    g_hi = residual(b)[0]
    c_lo = 0.5 * b
    for _ in range(max_march):
        g_lo = residual(c_lo)[0]
        if g_lo < 0:
            return c_lo, b, g_lo, g_hi
        c_lo *= 0.5
    return _confirm(residual, 0.0, b)


def _confirm(residual: _Residual, lo: float, hi: float) -> tuple[float, float, float, float]:
    g_lo, g_hi = residual(lo)[0], residual(hi)[0]
    if not (g_lo < 0 < g_hi):
        raise BracketFailure(f"residual does not change sign on [{lo:.12g}, {hi:.12g}]: {g_lo:.3e}, {g_hi:.3e}")
    return lo, hi, g_lo, g_hi


def radius_slack(opts: IntegratorOptions, R: float) -> float:
    """Ordering slack for residuals built from maximal radii near *R*."""
    return 10.0 * opts.tol * max(1.0, R)


def _bisect(
    func: Callable[[float], tuple[float, Any]],
    lo: float,
    hi: float,
    g_lo: float,
    g_hi: float,
    tol: float,
    tol_g: float | None,
    max_iter: int = MAX_ITER,
    slack: float | None = None,
) -> tuple[float, float, Any, list[tuple[float, float, Any]]]:
    """Bisection on an increasing function, secant steps inside narrow brackets.

    Residuals may leave ``[g_lo, g_hi]`` by *slack* before the ordering counts
    as violated; the default is ``10 tol_g``.

    Returns the root, its residual, the payload of the last evaluation and
    the history ``(lo, hi, payload)``.
    """
    history: list[tuple[float, float, Any]] = []
    force_bisect = False
    if slack is None:
        slack = 10.0 * (tol_g or 0.0)
    for _ in range(max_iter):
        width = hi - lo
        mid = 0.5 * (lo + hi)
        secant = (
            not force_bisect and width < SECANT_WINDOW * max(1.0, abs(hi)) and math.isfinite(g_lo + g_hi)
        )
        if secant:
            guess = lo - g_lo * width / (g_hi - g_lo)
            if lo < guess < hi:
                mid = guess
        g_mid, payload = func(mid)
        history.append((lo, hi, payload))
        if math.isfinite(g_lo) and g_mid < g_lo - slack or math.isfinite(g_hi) and g_mid > g_hi + slack:
            raise NonMonotone(f"residual {g_mid:.3e} at c={mid:.15g} outside [{g_lo:.3e}, {g_hi:.3e}]")
        if g_mid == 0:
            return mid, g_mid, payload, history
        if g_mid < 0:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
        force_bisect = secant and (hi - lo) > 0.5 * width
        close = tol_g is None or abs(g_mid) <= tol_g
        if hi - lo <= tol * max(1.0, abs(mid)) and close:
            return mid, g_mid, payload, history
        if hi - lo <= 4.0 * math.ulp(max(1.0, abs(mid))):
            logger.warning("bracket at machine resolution near c=%.15g, residual %.3e", mid, g_mid)
            return mid, g_mid, payload, history
    raise NonConvergence(f"no convergence after {max_iter} iterations, bracket [{lo:.15g}, {hi:.15g}]")


def find_speed(
    params: FlowParams,
    k: Slope | None = None,
    tol: float = 1e-10,
    tol_k: float | None = None,
    opts: IntegratorOptions | None = None,
    integrator: ProfileIntegrator | None = None,
) -> SpeedResult:
    """Find the unique speed ``c~`` with ``Psi(1; c~, b) = k``.

    Parameters
    ----------
    params : FlowParams
        Flow parameters.
    k : float | InfiniteSlope, optional
        Boundary slope; defaults to ``params.k``.
    tol : float
        Relative bracket width at termination.
    tol_k : float, optional
        Admissible boundary mismatch, default ``1e-8 max(1, |k|)``.
    opts : IntegratorOptions, optional
        Integration controls.
    integrator : ProfileIntegrator, optional
        Profile integrator, the singular ``zeta`` form by default.

    Returns
    -------
    SpeedResult

    Raises
    ------
    RegimeError
        If ``(b, k)`` is not admissible.
    BracketFailure, NonMonotone, NonConvergence
        On numerical failure.
    """
    k = _resolve_k(params, k)
    params = params.replace(k=k)
    case = _require_case(params, k)
    opts = opts or IntegratorOptions()
    if _is_flat(params, k):
        profile = flat_solution(params, params.b, opts.replace(r_max=1.0))
        return SpeedResult(params=params, c_tilde=params.b, case_tag=case, profile=profile, residual=0.0)

    infinite = isinstance(k, InfiniteSlope)
    if tol_k is None and not infinite:
        tol_k = 1e-8 * max(1.0, abs(k))
    residual = _Residual(params, k, opts, integrator or ZetaIntegrator())
    lo, hi, g_lo, g_hi = _bracket(params, k, case, residual, MAX_MARCH)
    logger.info("speed selection b=%g k=%s case %s: bracket [%.12g, %.12g]", params.b, k, case, lo, hi)

    cache: dict[float, ProfileSolution] = {}

    def func(c: float) -> tuple[float, float]:
        g, psi_one, sol = residual(c)
        cache.clear()
        cache[c] = sol
        return g, psi_one

    # infinite k roots R_inf - 1, accurate to the integrator tolerance
    slack = radius_slack(opts, 1.0) if infinite else None
    c_tilde, g, _, history = _bisect(func, lo, hi, g_lo, g_hi, tol, None if infinite else tol_k, slack=slack)
    profile = cache[c_tilde]
    if tol_k is not None and abs(g) > tol_k:
        logger.warning("boundary mismatch %.3e exceeds %.3e at c~=%.15g", g, tol_k, c_tilde)
    logger.info("c~=%.15g after %d evaluations (residual %.3e)", c_tilde, residual.calls, g)
    return SpeedResult(
        params=params,
        c_tilde=c_tilde,
        case_tag=case,
        profile=profile,
        residual=g,
        bracket_history=history,
        iterations=len(history),
    )


def find_speed_for_radius(
    params: FlowParams, R: float, tol: float = 1e-10, opts: IntegratorOptions | None = None
) -> float:
    """Find the speed whose profile has maximal radius *R*.

    Raises
    ------
    DomainError
        If *R* is outside ``((N - 1)(-b)^{-1/alpha}, N (-b)^{-1/alpha})`` for
        ``b < 0``, not above ``N b^{-1/alpha}`` for ``b > 0``, or ``b = 0``.
    """
    N, b = params.N, params.b
    opts = opts or IntegratorOptions()
    if b == 0:
        raise DomainError("b = 0 profiles are entire; no speed has a finite maximal radius")
    if b < 0:
        r_zero = N / params.root(-b)
        # at the vertical point 0 <= zeta' = (-b)^(1/alpha) - (N - 1)/R_inf
        r_floor = (N - 1) / params.root(-b)
        if not (r_floor < R < r_zero):
            raise DomainError(f"R must lie in ({r_floor:.12g}, {r_zero:.12g}) for b={b}, got {R}")
    else:
        if params.alpha_odd is None:
            raise RegimeError("b > 0 radii come from negative-curvature profiles, which require alpha_odd")
        r_zero = N / params.root(b)
        if not R > r_zero:
            raise DomainError(f"R must exceed {r_zero:.12g} for b={b}, got {R}")
    reach = opts.replace(r_max=2.0 * R)
    integrator = ZetaIntegrator()

    def func(c: float) -> tuple[float, float]:
        r_inf = _r_infinity_or_lower(integrator(params, c, reach))
        return (R - r_inf if b < 0 else r_inf - R), r_inf

    g_lo = func(0.0)[0]
    if b < 0:
        hi = max(1.0, -b)
        for _ in range(MAX_MARCH):
            g_hi = func(hi)[0]
            if g_hi > 0:
                break
            hi *= 2.0
        else:
            raise BracketFailure(f"no speed with R_inf < {R} up to c={hi / 2:.6g}")
    else:
        hi, g_hi = b, math.inf
    c, _, _, _ = _bisect(func, 0.0, hi, g_lo, g_hi, tol, None, slack=radius_slack(opts, R))
    logger.info("speed %.15g gives R_inf=%.12g", c, R)
    return c


def translating_solution(
    params: FlowParams, k: Slope | None = None, tol: float = 1e-10, opts: IntegratorOptions | None = None
) -> tuple[float, ProfileSolution]:
    """Return ``(c~, Phi~)`` with ``Phi~`` sampled on ``[0, 1]`` and ``Phi~(0) = 0``."""
    result = find_speed(params, k, tol=tol, opts=opts)
    return result.c_tilde, result.profile
