"""Regime-level analysis of profiles: far-field laws, cone defect, ordering in ``c``."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from typing import Any, TypedDict

import numpy as np

from gmcf_translate.core import FlowParams, RegimeTag, classify_regime
from gmcf_translate.exceptions import NotApplicable, OrderingViolation
from gmcf_translate.profiles._common import attach_r_infinity
from gmcf_translate.profiles._types import IntegratorOptions, ProfileSolution
from gmcf_translate.profiles.zeta import integrate_zeta

logger = logging.getLogger(__name__)

_QUANTITIES = ("auto", "phi", "psi", "psi_corrected")


def cone_slope(params: FlowParams, c: float) -> float:
    """Limit slope ``Psi_0 = sqrt(c^2 - b^2) / b`` for ``c > b > 0``."""
    if classify_regime(params, c) is not RegimeTag.C_GT_B_POS:
        raise NotApplicable("the cone slope exists only for c > b > 0")
    return math.sqrt(c * c - params.b**2) / params.b


def asymptotic_value(params: FlowParams, c: float, r: float, quantity: str = "auto") -> float:
    """Leading-order far-field value of the profile.

    Parameters
    ----------
    params : FlowParams
        Flow parameters.
    c : float
        Translation speed.
    r : float
        Radius (``r > 0``).
    quantity : str
        ``"auto"`` gives ``Phi ~ c r^{alpha+1} / ((alpha+1)(N-1)^alpha)`` for
        ``b = 0`` and the cone slope ``Psi_0`` for ``c > b > 0``. ``"psi"``
        gives ``Psi ~ c r^alpha / (N-1)^alpha`` for ``b = 0``.
        ``"psi_corrected"`` gives ``Psi_0 - (N-1) c / (b^2 r)`` for
        ``c > b > 0`` and ``alpha = 1``.

    Raises
    ------
    NotApplicable
        For blow-up regimes, ``c == b``, or a quantity the regime does not have.
    """
    if quantity not in _QUANTITIES:
        raise ValueError(f"quantity must be one of {_QUANTITIES}, got {quantity!r}")
    regime = classify_regime(params, c)
    N, alpha, b = params.N, params.alpha, params.b
    if regime is RegimeTag.B_ZERO and quantity in ("auto", "phi"):
        return c * r ** (alpha + 1) / ((alpha + 1) * (N - 1) ** alpha)
    if regime is RegimeTag.B_ZERO and quantity == "psi":
        return c * r**alpha / (N - 1) ** alpha
    if regime is RegimeTag.C_GT_B_POS and quantity == "auto":
        return cone_slope(params, c)
    if regime is RegimeTag.C_GT_B_POS and quantity == "psi_corrected":
        if alpha != 1:
            raise NotApplicable("the 1/r correction is derived for alpha = 1")
        return cone_slope(params, c) - (N - 1) * c / (b * b * r)
    raise NotApplicable(f"no far-field law {quantity!r} in regime {regime.value}")


def v_shape_defect(sol: ProfileSolution, r: Any) -> Any:
    """Return ``Psi_0 r - Phi(r)`` for a profile with ``c > b > 0``.

    The defect is increasing in ``r`` and diverges for ``alpha <= 1``.
    """
    if sol.regime is not RegimeTag.C_GT_B_POS:
        raise NotApplicable("the cone defect exists only for c > b > 0")
    if sol.params.alpha > 1:
        logger.debug("alpha=%g > 1: divergence of the cone defect is not asserted", sol.params.alpha)
    slope = cone_slope(sol.params, sol.c)
    rr = np.asarray(r, dtype=float)
    value = slope * rr - sol.phi_at(rr)
    return float(value) if np.ndim(r) == 0 else value


class SandwichReport(TypedDict):
    """Worst margins of the integrated bounds on ``zeta`` (``b <= 0``)."""

    upper_margin: float
    lower_margin: float
    holds: bool


def sandwich_bounds(sol: ProfileSolution, slack: float = 1e-8) -> SandwichReport:
    """Check ``(c-b)^{1/alpha} r/N >= zeta >= (c sqrt(1-zeta^2) - b)^{1/alpha} r/N`` at the nodes."""
    params = sol.params
    if params.b > 0:
        raise NotApplicable("the integrated bounds are stated for b <= 0")
    r, zeta = sol.r_grid, sol.zeta
    N = params.N
    upper = params.root(sol.c - params.b) * r / N
    lower = params.root(sol.c * np.sqrt(np.maximum(1.0 - zeta**2, 0.0)) - params.b) * r / N
    upper_margin = float(np.min(upper - zeta))
    lower_margin = float(np.min(zeta - lower))
    return {
        "upper_margin": upper_margin,
        "lower_margin": lower_margin,
        "holds": upper_margin >= -slack and lower_margin >= -slack,
    }


class MonotonicityReport(TypedDict):
    """Result of comparing profiles at two speeds.

    Parameters
    ----------
    radii : list[float]
        Sample radii inside both profiles' ranges.
    margins : list[float]
        ``Psi(r; c2) - Psi(r; c1)`` at the radii.
    r_inf : list[float | None]
        Maximal radii at ``c1`` and ``c2``.
    phi_end : list[float | None]
        Endpoint heights at ``c1`` and ``c2``.
    phi_end_ordered : bool | None
        Whether the endpoint heights follow the proved ordering.
    """

    radii: list[float]
    margins: list[float]
    r_inf: list[float | None]
    phi_end: list[float | None]
    phi_end_ordered: bool | None


def monotonicity_probe(
    params: FlowParams,
    c1: float,
    c2: float,
    r_samples: Sequence[float],
    opts: IntegratorOptions | None = None,
) -> MonotonicityReport:
    """Verify that the profile slope increases with the speed.

    Raises
    ------
    ValueError
        If ``c1 >= c2`` or the speeds lie in different regimes.
    OrderingViolation
        At the first radius where ``Psi(r; c2) <= Psi(r; c1)``, or when the
        maximal radii are ordered the wrong way.
    """
    if not (0 < c1 < c2):
        raise ValueError(f"need 0 < c1 < c2, got c1={c1}, c2={c2}")
    regime = classify_regime(params, c1)
    if classify_regime(params, c2) is not regime:
        raise ValueError(f"c1={c1} and c2={c2} lie in different regimes")
    opts = opts or IntegratorOptions()
    low = attach_r_infinity(integrate_zeta(params, c1, opts))
    high = attach_r_infinity(integrate_zeta(params, c2, opts))

    end = min(low.r_end, high.r_end)
    radii = [float(r) for r in r_samples if 0 < r < end]
    margins = np.atleast_1d(high.psi_at(np.asarray(radii)) - low.psi_at(np.asarray(radii))) if radii else np.array([])
    for r, m in zip(radii, margins):
        if not m > 0:
            raise OrderingViolation(f"Psi(r; c2) - Psi(r; c1) = {m:.3e} at r={r:.6g}", radius=r)

    phi_end_ordered = None
    if regime.blows_up and low.r_inf is not None and high.r_inf is not None:
        if regime is RegimeTag.B_NEG:
            radii_ok = high.r_inf < low.r_inf
            phi_end_ordered = high.phi_end < low.phi_end
        else:
            radii_ok = high.r_inf > low.r_inf
        if not radii_ok:
            raise OrderingViolation(
                f"R_inf({c1})={low.r_inf:.10g}, R_inf({c2})={high.r_inf:.10g} ordered against the regime",
                radius=min(low.r_inf, high.r_inf),
            )
        if phi_end_ordered is False:
            logger.warning("endpoint heights %.10g, %.10g not ordered as expected", low.phi_end, high.phi_end)

    return {
        "radii": radii,
        "margins": [float(m) for m in margins],
        "r_inf": [low.r_inf, high.r_inf],
        "phi_end": [low.phi_end, high.phi_end],
        "phi_end_ordered": phi_end_ordered,
    }
