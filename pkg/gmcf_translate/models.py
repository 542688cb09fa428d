"""Records produced by evolution runs and their diagnostics."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np


@dataclass(frozen=True)
class TravelingReference:
    """Translating solution sampled on an evolution grid.

    Parameters
    ----------
    c_tilde : float
        Speed of the translating solution.
    phi : numpy.ndarray
        ``Phi~`` at the grid nodes, ``phi[0] == 0``.
    """

    c_tilde: float
    phi: np.ndarray

    def __post_init__(self) -> None:
        """Validate the samples."""
        phi = np.asarray(self.phi, dtype=float)
        if phi.ndim != 1 or phi.size < 2:
            raise ValueError(f"phi must be a 1-D array with at least two nodes, got shape {phi.shape}")
        object.__setattr__(self, "phi", phi)


@dataclass
class ConvergenceRecord:
    """Time series of the distance to the translating solution.

    Parameters
    ----------
    times : list[float]
        Sample times.
    raw : list[float]
        ``sup |u - Phi~ - c~ t|``.
    oscillation : list[float]
        ``max w - min w`` for ``w = u - Phi~ - c~ t``.
    drift_corrected : list[float]
        ``sup |w - M|`` with the running offset ``M`` (mean of ``w``).
    offset : list[float]
        Running offset estimate ``M``.
    front_speed : list[float]
        Observed ``du(0, t)/dt`` between consecutive samples.
    axis_height : list[float]
        ``u(0, t)``.
    """

    times: list[float] = field(default_factory=list)
    raw: list[float] = field(default_factory=list)
    oscillation: list[float] = field(default_factory=list)
    drift_corrected: list[float] = field(default_factory=list)
    offset: list[float] = field(default_factory=list)
    front_speed: list[float] = field(default_factory=list)
    axis_height: list[float] = field(default_factory=list)

    def append(
        self, t: float, raw: float, oscillation: float, drift: float, offset: float, speed: float, axis: float
    ) -> None:
        """Add one sample."""
        self.times.append(t)
        self.raw.append(raw)
        self.oscillation.append(oscillation)
        self.drift_corrected.append(drift)
        self.offset.append(offset)
        self.front_speed.append(speed)
        self.axis_height.append(axis)

    def mean_front_speed(self, t1: float, t2: float) -> float:
        """``(u(0, t2) - u(0, t1)) / (t2 - t1)`` between the samples nearest to *t1* and *t2*."""
        times = np.asarray(self.times)
        if times.size < 2:
            raise ValueError("at least two samples are required")
        i = int(np.argmin(np.abs(times - t1)))
        j = int(np.argmin(np.abs(times - t2)))
        if j <= i:
            raise ValueError(f"no sample pair spans [{t1}, {t2}]")
        return (self.axis_height[j] - self.axis_height[i]) / (times[j] - times[i])

    def rows(self) -> list[dict[str, float]]:
        """Samples as records for tabular output."""
        keys = ("times", "raw", "oscillation", "drift_corrected", "offset", "front_speed", "axis_height")
        return [dict(zip(keys, values)) for values in zip(*(getattr(self, k) for k in keys))]

    def to_dict(self) -> dict[str, Any]:
        """Serializable view."""
        return asdict(self)


@dataclass
class EstimateReport:
    """Observed extrema of the quantities bounded uniformly in time.

    Parameters
    ----------
    M0_obs : float
        ``sup |u - c~ t|``.
    M1_obs : float
        ``sup |u_r|``.
    M2_obs : float
        ``sup |u_rr|``.
    Vstar_obs, Vsup_obs : float
        ``inf`` and ``sup`` of ``u_t``.
    Hstar_obs, Hsup_obs : float
        ``inf`` and ``sup`` of ``sgn(k) H``.
    windows : list[list[float]]
        Time windows compared for growth.
    growth : dict[str, float]
        Relative growth of each quantity between the early and the full window.
    flagged : list[str]
        Quantities whose growth exceeds the tolerance.
    """

    M0_obs: float
    M1_obs: float
    M2_obs: float
    Vstar_obs: float
    Vsup_obs: float
    Hstar_obs: float
    Hsup_obs: float
    windows: list[list[float]] = field(default_factory=list)
    growth: dict[str, float] = field(default_factory=dict)
    flagged: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        """Serializable view."""
        return asdict(self)


@dataclass
class IntersectionTrace:
    """Sign-change counts of ``u - (Phi(.; c) + c t + d)`` over time.

    Parameters
    ----------
    c : float
        Speed of the comparison family.
    shifts : list[float]
        Vertical shifts ``d``.
    times : list[float]
        Sample times.
    counts : dict[str, list[int]]
        Sign changes per shift, keyed by ``repr`` of the shift.
    violations : list[dict[str, Any]]
        Samples at which a count increased.
    """

    c: float
    shifts: list[float]
    times: list[float] = field(default_factory=list)
    counts: dict[str, list[int]] = field(default_factory=dict)
    violations: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        """Serializable view."""
        return asdict(self)
