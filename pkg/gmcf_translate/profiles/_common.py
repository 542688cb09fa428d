"""Shared helpers for the profile integrators.

Series start at the axis, endpoint extrapolation of the maximal radius,
the endpoint quadrature of ``Phi`` and the cross-check between integrators.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np

from gmcf_translate.core import FlowParams, RegimeTag, r_infinity_bounds
from gmcf_translate.exceptions import CrossCheckFailure, NotApplicable, StepFailure
from gmcf_translate.profiles._types import IntegratorOptions, Piece, ProfileInterpolant, ProfileSolution

logger = logging.getLogger(__name__)

TAIL_NODES = 64


def make_forcing(params: FlowParams, c: float) -> Callable[[float], float]:
    """Return ``g(s) = (c s - b)^(1/alpha)`` where ``s = sqrt(1 - zeta^2)``.

    Without an odd-rational exponent the base is clipped at zero; the exact
    solution never crosses it, only trial stages of the integrator do.
    """
    e = 1.0 / params.alpha
    b = params.b
    odd = params.alpha_odd is not None

    def forcing(s: float) -> float:
        base = c * s - b
        if base < 0:
            return -((-base) ** e) if odd else 0.0
        return base**e

    return forcing


def series_coefficients(params: FlowParams, c: float) -> tuple[float, float]:
    """Coefficients of ``zeta(r) = a r + a3 r^3 + O(r^5)`` at the axis."""
    N = params.N
    base = c - params.b
    e = 1.0 / params.alpha
    g0 = params.root(base)
    a = g0 / N
    if base == 0:
        return a, 0.0
    g2 = -0.5 * c * e * abs(base) ** (e - 1.0)
    return a, g2 * a * a / (N + 2)


def series_start(params: FlowParams, c: float, opts: IntegratorOptions) -> tuple[float, float, float]:
    """Radius and ``(zeta, Phi)`` where the adaptive integrator takes over."""
    a, a3 = series_coefficients(params, c)
    r0 = opts.dr_init
    if a != 0:
        r0 = min(r0, 1e-3 / abs(a))
    r0 = min(r0, 1e-3 * opts.r_max)
    zeta0 = a * r0 + a3 * r0**3
    phi0 = 0.5 * a * r0**2 + 0.25 * (a3 + 0.5 * a**3) * r0**4
    return r0, zeta0, phi0


def series_piece(params: FlowParams, c: float, r0: float) -> Piece:
    """Dense evaluation on ``[0, r0]`` from the axis series."""
    a, a3 = series_coefficients(params, c)

    def fields(r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        zeta = a * r + a3 * r**3
        psi = zeta / np.sqrt(1.0 - zeta**2)
        phi = 0.5 * a * r**2 + 0.25 * (a3 + 0.5 * a**3) * r**4
        return zeta, psi, phi

    return 0.0, r0, fields


def zeta_state_piece(sol: Any, start: float, end: float) -> Piece:
    """Dense evaluation of an ``(zeta, Phi)`` integration segment."""

    def fields(r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        y = sol(r)
        zeta = y[0]
        psi = zeta / np.sqrt(np.maximum(1.0 - zeta**2, 1e-300))
        return zeta, psi, y[1]

    return start, end, fields


def psi_state_piece(sol: Any, start: float, end: float) -> Piece:
    """Dense evaluation of a ``(psi, Phi)`` integration segment."""

    def fields(r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        y = sol(r)
        psi = y[0]
        return psi / np.sqrt(1.0 + psi**2), psi, y[1]

    return start, end, fields


def check_ivp(result: Any, label: str) -> None:
    """Raise :class:`StepFailure` when ``solve_ivp`` did not finish cleanly."""
    if result.status == -1:
        raise StepFailure(f"{label} integration failed: {result.message}")


def flat_solution(params: FlowParams, c: float, opts: IntegratorOptions, method: str = "zeta") -> ProfileSolution:
    """Exact profile ``Phi == 0`` for ``c == b > 0``."""
    r_grid = np.array([0.0, opts.r_max])
    zeros = np.zeros_like(r_grid)
    r_max = opts.r_max

    def fields(r: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        z = np.zeros_like(r)
        return z, z, z

    return ProfileSolution(
        params=params,
        c=c,
        regime=RegimeTag.C_EQ_B,
        r_grid=r_grid,
        zeta=zeros,
        psi=zeros,
        phi=zeros,
        method=method,
        metadata={"exact": "flat"},
        dense=ProfileInterpolant([(0.0, r_max, fields)]),
    )


def _endpoint_radius(r_c: float, delta: float, slope_limit: float, N: int, eps: float) -> float | None:
    """Solve ``R - r_c = delta / (s - (N-1)/(R+eps))`` for the root next to ``r_c``."""
    rp = r_c + eps
    B = N - 1 + slope_limit * rp + delta
    disc = B * B - 4.0 * slope_limit * (N - 1) * rp
    if slope_limit <= 0 or disc < 0:
        return None
    R = (B + math.sqrt(disc)) / (2.0 * slope_limit) - eps
    if slope_limit - (N - 1) / (R + eps) <= 0:
        return None
    return R


def tail_integral(zeta_c: float, delta: float, rho_c: float, nodes: int = TAIL_NODES) -> float:
    """Integral of ``|Psi|`` over the last ``rho_c`` before the maximal radius.

    ``|zeta|`` is taken linear in the distance ``rho`` to the endpoint and the
    ``rho^{-1/2}`` singularity is removed by integrating in ``s = sqrt(rho)``
    with the midpoint rule.
    """
    if rho_c <= 0:
        return 0.0
    s_max = math.sqrt(rho_c)
    s = (np.arange(nodes) + 0.5) * (s_max / nodes)
    z = 1.0 - delta * s**2 / rho_c
    integrand = 2.0 * z / (math.sqrt(delta / rho_c) * np.sqrt(1.0 + z))
    return float(integrand.sum() * (s_max / nodes))


def estimate_r_infinity(sol: ProfileSolution) -> tuple[float, tuple[float, float], float]:
    """Extrapolate the maximal radius from the last integrated node.

    Uses ``|zeta| ~ 1 - 2a (R - r)`` with the endpoint slope ``2a`` solved
    self-consistently from ``2a = |b|^{1/alpha} - (N - 1)/R``.

    Returns
    -------
    r_inf : float
        Extrapolated maximal radius.
    bracket : tuple[float, float]
        ``[last node, r_inf + (r_inf - last node)]``.
    phi_end : float
        Extrapolated height at the maximal radius.

    Raises
    ------
    NotApplicable
        For entire profiles or when the cutoff was not reached.
    """
    if not sol.regime.blows_up:
        raise NotApplicable(f"regime {sol.regime.value} has no finite maximal radius")
    if not sol.reached_cutoff:
        raise NotApplicable("integration stopped before the blow-up cutoff")
    params = sol.params
    N = params.N
    r_c = float(sol.r_grid[-1])
    zeta_c = float(sol.zeta[-1])
    delta = 1.0 - abs(zeta_c)
    slope_limit = params.root(abs(params.b))
    R = _endpoint_radius(r_c, delta, slope_limit, N, sol.eps)
    if R is None:
        # the endpoint law is not yet valid; fall back on the local slope
        local = abs(float(sol.psi_prime_at(r_c))) * (1.0 - zeta_c**2) ** 1.5
        R = r_c + delta / local
        logger.warning("endpoint law not applicable at r=%.6g; using local slope", r_c)
    rho_c = R - r_c
    bracket = (r_c, R + rho_c)
    phi_end = float(sol.phi[-1]) + math.copysign(tail_integral(abs(zeta_c), delta, rho_c), zeta_c)
    if sol.eps == 0:
        _check_bounds(params, sol.c, bracket)
    return R, bracket, phi_end


def _check_bounds(params: FlowParams, c: float, bracket: tuple[float, float]) -> None:
    lo, hi = r_infinity_bounds(params, c)
    slack = 1e-9 * hi
    if bracket[0] < lo - slack or bracket[1] > hi + max(slack, bracket[1] - bracket[0]):
        logger.warning("R_inf bracket %s lies outside the proved bounds [%.12g, %.12g]", bracket, lo, hi)


def attach_r_infinity(sol: ProfileSolution) -> ProfileSolution:
    """Return *sol* with the maximal-radius estimate filled in when available."""
    if not (sol.regime.blows_up and sol.reached_cutoff):
        return sol
    r_inf, bracket, phi_end = estimate_r_infinity(sol)
    return sol.replace(r_inf=r_inf, r_inf_bracket=bracket, phi_end=phi_end)


def comparison_radius(sol: ProfileSolution, opts: IntegratorOptions) -> float:
    """Right end of the interval on which two integrators are compared."""
    if sol.regime.blows_up and sol.reached_cutoff:
        r_inf = sol.r_inf if sol.r_inf is not None else estimate_r_infinity(sol)[0]
        return 0.9 * r_inf
    return min(sol.r_end, opts.check_radius)


def compare_profiles(
    reference: ProfileSolution,
    candidates: Sequence[ProfileSolution],
    opts: IntegratorOptions,
    nodes: int = 401,
) -> dict[str, Any]:
    """Compare the singular profile with regularized profiles.

    The regularized slopes must enclose the singular one in magnitude and
    their deviation must shrink with ``eps``. Candidates are sorted by
    decreasing ``eps``.

    Raises
    ------
    CrossCheckFailure
        If either property fails beyond ``10 * tol``.
    """
    slack = 10.0 * opts.tol
    sign = reference.regime.sign or 1
    rows = []
    for cand in sorted(candidates, key=lambda s: -s.eps):
        end = min(comparison_radius(reference, opts), comparison_radius(cand, opts))
        grid = np.linspace(0.0, end, nodes)
        ref_psi = reference.psi_at(grid)
        cand_psi = cand.psi_at(grid)
        dev = cand_psi - ref_psi
        scale = np.maximum(1.0, np.abs(ref_psi))
        worst = int(np.argmax(np.abs(dev)))
        enclosed = bool(np.all(sign * dev >= -slack * scale))
        rows.append(
            {
                "eps": cand.eps,
                "interval": [0.0, float(end)],
                "max_deviation": float(np.abs(dev[worst])),
                "worst_radius": float(grid[worst]),
                "enclosed": enclosed,
            }
        )
    devs = [row["max_deviation"] for row in rows]
    monotone = all(later <= earlier + slack for earlier, later in zip(devs, devs[1:]))
    report = {"deviations": rows, "monotone": monotone}
    logger.debug("cross-check c=%.12g: %s", reference.c, devs)
    if not monotone:
        raise CrossCheckFailure(f"regularized deviations do not decrease with eps: {devs}")
    failed = [row for row in rows if not row["enclosed"]]
    if failed:
        row = failed[0]
        raise CrossCheckFailure(
            f"singular profile not enclosed by eps={row['eps']} profile near r={row['worst_radius']:.6g}"
        )
    return report
