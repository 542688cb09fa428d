"""Shared types and elementary operations for radially symmetric translating flows.

The flow moves a graph ``x_{N+1} = u(|x|, t)`` with normal speed ``H^alpha + b``.
Everything downstream works with :class:`FlowParams`, the regime classifier and
the sign-preserving power defined here.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np

from gmcf_translate.exceptions import DomainError, NotApplicable, RegimeError

logger = logging.getLogger(__name__)

_ODD_RTOL = 1e-12


class RegimeTag(str, Enum):
    """Qualitative behaviour of the profile for a given ``(c, b)``."""

    B_ZERO = "b_zero"
    B_NEG = "b_neg"
    C_GT_B_POS = "c_gt_b_pos"
    C_EQ_B = "c_eq_b"
    B_GT_C_POS = "b_gt_c_pos"

    @property
    def blows_up(self) -> bool:
        """Whether the profile has a finite maximal radius."""
        return self in (RegimeTag.B_NEG, RegimeTag.B_GT_C_POS)

    @property
    def sign(self) -> int:
        """Sign of the slope and curvature of the profile."""
        if self is RegimeTag.B_GT_C_POS:
            return -1
        if self is RegimeTag.C_EQ_B:
            return 0
        return 1


class InfiniteSlope(str, Enum):
    """Vertical boundary slope ``k = +inf`` or ``k = -inf``."""

    POS = "+inf"
    NEG = "-inf"

    @property
    def sign(self) -> int:
        """Sign of the infinite slope."""
        return 1 if self is InfiniteSlope.POS else -1

    def __float__(self) -> float:
        """Return the slope as a signed float infinity."""
        return math.inf if self is InfiniteSlope.POS else -math.inf


Slope = float | InfiniteSlope


def parse_slope(value: Any) -> Slope | None:
    """Convert user input (``"inf"``, ``"-inf"``, numbers) to a :data:`Slope`."""
    if value is None or isinstance(value, InfiniteSlope):
        return value
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity", "+infinity"):
            return InfiniteSlope.POS
        if text in ("-inf", "-infinity"):
            return InfiniteSlope.NEG
        value = float(text)
    value = float(value)
    if math.isinf(value):
        return InfiniteSlope.POS if value > 0 else InfiniteSlope.NEG
    if math.isnan(value):
        raise DomainError("boundary slope k must not be NaN")
    return value


def slope_sign(k: Slope) -> int:
    """Return the sign of an extended slope."""
    if isinstance(k, InfiniteSlope):
        return k.sign
    return int(np.sign(k))


@dataclass(frozen=True)
class PowerSpec:
    """Exponent description for :func:`signed_pow`.

    Parameters
    ----------
    alpha : float
        Positive exponent.
    odd_rational : bool
        ``True`` when ``alpha = q/p`` with ``q`` and ``p`` odd, in which case
        negative bases are admitted and ``x^alpha`` keeps the sign of ``x``.
    """

    alpha: float
    odd_rational: bool = False


@dataclass(frozen=True)
class FlowParams:
    """Parameters of the flow ``V = H^alpha + b`` in ``R^{N+1}``.

    Parameters
    ----------
    N : int
        Number of spatial dimensions of the graph (``N >= 2``).
    alpha : float
        Curvature exponent (``alpha > 0``).
    b : float
        Constant forcing term.
    k : float | InfiniteSlope | None
        Boundary slope ``u_r(1, t)`` for the Neumann problem. ``None`` when
        only profiles are needed.
    alpha_odd : tuple[int, int] | None
        ``(q, p)`` positive odd integers with ``q / p == alpha``. Required by
        every regime with negative curvature.
    """

    N: int
    alpha: float
    b: float
    k: Slope | None = None
    alpha_odd: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        """Validate parameter values."""
        if isinstance(self.N, bool) or not isinstance(self.N, (int, np.integer)) or self.N < 2:
            raise DomainError(f"N must be an integer >= 2, got {self.N!r}")
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"alpha must be a positive finite number, got {self.alpha}")
        if not math.isfinite(self.b):
            raise DomainError(f"b must be finite, got {self.b}")
        if self.alpha_odd is not None:
            q, p = self.alpha_odd
            if q <= 0 or p <= 0 or q % 2 == 0 or p % 2 == 0:
                raise DomainError(f"alpha_odd must be a pair of positive odd integers, got {self.alpha_odd}")
            if not math.isclose(q / p, self.alpha, rel_tol=_ODD_RTOL):
                raise DomainError(f"alpha_odd {q}/{p} does not match alpha={self.alpha}")
        k = parse_slope(self.k)
        object.__setattr__(self, "k", k)
        if k is not None and self.b > 0 and slope_sign(k) < 0 and self.alpha_odd is None:
            raise RegimeError(f"b={self.b} > 0 > k={k} needs negative curvature, which requires alpha_odd")

    @classmethod
    def with_odd_alpha(cls, N: int, q: int, p: int, b: float, k: Slope | None = None) -> FlowParams:
        """Build parameters with ``alpha = q/p`` for odd ``q`` and ``p``."""
        return cls(N=N, alpha=q / p, b=b, k=k, alpha_odd=(q, p))

    @property
    def power_spec(self) -> PowerSpec:
        """Exponent spec for ``x^alpha``."""
        return PowerSpec(self.alpha, self.alpha_odd is not None)

    @property
    def inverse_power_spec(self) -> PowerSpec:
        """Exponent spec for ``x^(1/alpha)``."""
        return PowerSpec(1.0 / self.alpha, self.alpha_odd is not None)

    def root(self, x: Any) -> Any:
        """Return ``x^(1/alpha)`` with the sign convention of :func:`signed_pow`."""
        return signed_pow(x, 1.0 / self.alpha, self.inverse_power_spec)

    def replace(self, **changes: Any) -> FlowParams:
        """Return a copy with some fields replaced."""
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        """Serializable view, infinite slopes rendered as strings."""
        k = self.k.value if isinstance(self.k, InfiniteSlope) else self.k
        return {
            "N": int(self.N),
            "alpha": self.alpha,
            "alpha_odd": list(self.alpha_odd) if self.alpha_odd else None,
            "b": self.b,
            "k": k,
        }


def signed_pow(x: Any, e: float, spec: PowerSpec) -> Any:
    """Raise *x* to the power *e*, keeping the sign for odd-rational exponents.

    Parameters
    ----------
    x : float or array_like
        Base.
    e : float
        Positive exponent.
    spec : PowerSpec
        Whether negative bases are admitted.

    Returns
    -------
    float or numpy.ndarray
        ``sign(x) |x|^e``; a float for scalar input.

    Raises
    ------
    DomainError
        If ``x < 0`` and ``spec.odd_rational`` is false.
    """
    if isinstance(x, (float, int)) and not isinstance(x, bool):
        if x < 0:
            if not spec.odd_rational:
                raise DomainError(f"negative base {x} requires an odd-rational exponent")
            return -((-x) ** e)
        return float(x) ** e
    arr = np.asarray(x, dtype=float)
    if not spec.odd_rational and np.any(arr < 0):
        raise DomainError(f"negative base (min {arr.min()}) requires an odd-rational exponent")
    out = np.sign(arr) * np.abs(arr) ** e
    return float(out) if out.ndim == 0 else out


def curvature_radial(r: Any, ur: Any, urr: Any, N: int) -> Any:
    """Mean curvature of the radial graph ``u(|x|)``.

    ``H = u_rr / (1 + u_r^2)^{3/2} + (N - 1) u_r / (r sqrt(1 + u_r^2))`` and
    ``H = N u_rr`` on the axis ``r = 0``.

    Raises
    ------
    DomainError
        If ``r < 0`` or ``u_r != 0`` on the axis.
    """
    scalar = all(np.ndim(v) == 0 for v in (r, ur, urr))
    r_a, ur_a, urr_a = np.broadcast_arrays(
        np.asarray(r, dtype=float), np.asarray(ur, dtype=float), np.asarray(urr, dtype=float)
    )
    if np.any(r_a < 0):
        raise DomainError("radius must be non-negative")
    axis = r_a == 0
    if np.any(ur_a[axis] != 0):
        raise DomainError("u_r must vanish on the axis r = 0")
    xi = np.sqrt(1.0 + ur_a**2)
    safe_r = np.where(axis, 1.0, r_a)
    H = np.where(axis, N * urr_a, urr_a / xi**3 + (N - 1) * ur_a / (safe_r * xi))
    return float(H) if scalar else H


def regime_tolerance(b: float) -> float:
    """Tolerance under which ``c`` and ``b`` are treated as equal."""
    return 1e-12 * max(1.0, abs(b))


def classify_regime(params: FlowParams, c: float, tol: float | None = None) -> RegimeTag:
    """Classify the profile regime for speed *c*.

    ``c = 0`` is admitted as a degenerate probe used by speed selection.

    Raises
    ------
    DomainError
        If ``c < 0``.
    RegimeError
        If ``b > c > 0`` (or ``c = 0 < b``) without an odd-rational exponent.
    """
    if not math.isfinite(c) or c < 0:
        raise DomainError(f"speed c must be finite and >= 0, got {c}")
    b = params.b
    if b == 0:
        return RegimeTag.B_ZERO
    if b < 0:
        return RegimeTag.B_NEG
    tol = regime_tolerance(b) if tol is None else tol
    if abs(c - b) <= tol:
        return RegimeTag.C_EQ_B
    if c > b:
        return RegimeTag.C_GT_B_POS
    if params.alpha_odd is None:
        raise RegimeError(f"b={b} > c={c} gives negative curvature, which requires alpha_odd")
    return RegimeTag.B_GT_C_POS


def r_infinity_bounds(params: FlowParams, c: float) -> tuple[float, float]:
    """Proved enclosure of the maximal radius in the blow-up regimes.

    Raises
    ------
    NotApplicable
        For regimes with an entire profile.
    """
    regime = classify_regime(params, c)
    N, b = params.N, params.b
    if regime is RegimeTag.B_NEG:
        return N / params.root(c - b), N / params.root(-b)
    if regime is RegimeTag.B_GT_C_POS:
        return N / params.root(b), N / params.root(b - c)
    raise NotApplicable(f"regime {regime.value} has an entire profile")
