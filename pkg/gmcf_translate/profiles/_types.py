"""Type definitions for profile integrators, their registry, and the solution record."""

from __future__ import annotations

import dataclasses
import math
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from gmcf_translate.core import FlowParams, RegimeTag

Piece = tuple[float, float, Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]]]


@dataclass(frozen=True)
class IntegratorOptions:
    """Controls for the profile integrators.

    Parameters
    ----------
    dr_init : float
        Upper bound for the radius at which the series start hands over to
        the adaptive integrator.
    tol : float
        Relative tolerance of the adaptive integrator.
    zeta_cutoff : float
        Blow-up cutoff ``delta``: integration stops at ``|zeta| = 1 - delta``.
    r_max : float
        Largest radius integrated.
    zeta_switch : float
        For entire profiles, ``|zeta|`` above which integration continues in
        the slope variable ``psi``.
    check_radius : float
        Cross-check interval length for entire profiles.
    """

    dr_init: float = 1e-4
    tol: float = 1e-10
    zeta_cutoff: float = 1e-6
    r_max: float = 1e3
    zeta_switch: float = 0.99
    check_radius: float = 5.0

    def __post_init__(self) -> None:
        """Validate option values."""
        if not self.dr_init > 0:
            raise ValueError(f"dr_init must be > 0, got {self.dr_init}")
        if not (0 < self.tol < 1e-2):
            raise ValueError(f"tol must be in (0, 1e-2), got {self.tol}")
        if not (0 < self.zeta_cutoff < 1e-2):
            raise ValueError(f"zeta_cutoff must be in (0, 1e-2), got {self.zeta_cutoff}")
        if not self.r_max > 0:
            raise ValueError(f"r_max must be > 0, got {self.r_max}")
        if not (0.5 <= self.zeta_switch < 1 - self.zeta_cutoff):
            raise ValueError(f"zeta_switch must be in [0.5, 1 - zeta_cutoff), got {self.zeta_switch}")
        if not self.check_radius > 0:
            raise ValueError(f"check_radius must be > 0, got {self.check_radius}")

    def replace(self, **changes: Any) -> IntegratorOptions:
        """Return a copy with some fields replaced."""
        return dataclasses.replace(self, **changes)


class ProfileInterpolant:
    """Piecewise dense evaluation of ``(zeta, psi, phi)``.

    Each piece covers ``[r_start, r_end]`` and maps radii to the three fields.
    Later pieces win at shared endpoints; radii outside every piece give NaN.
    """

    def __init__(self, pieces: Sequence[Piece]) -> None:
        self._pieces = list(pieces)

    @property
    def r_end(self) -> float:
        """Largest radius covered."""
        return self._pieces[-1][1] if self._pieces else 0.0

    def __call__(self, r: Any) -> np.ndarray:
        """Evaluate the fields, returning an array of shape ``(3, n)``."""
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.full((3, rr.size), np.nan)
        for start, end, fn in self._pieces:
            mask = (rr >= start) & (rr <= end)
            if np.any(mask):
                zeta, psi, phi = fn(rr[mask])
                out[0, mask] = zeta
                out[1, mask] = psi
                out[2, mask] = phi
        return out


def _evaluate(values: np.ndarray, r: Any) -> Any:
    return float(values[0]) if np.ndim(r) == 0 else values


@dataclass(frozen=True, eq=False)
class ProfileSolution:
    """Sampled translating profile ``Phi(r; c, b)``.

    Parameters
    ----------
    params : FlowParams
        Flow parameters.
    c : float
        Translation speed.
    regime : RegimeTag
        Regime of ``(c, b)``.
    r_grid : numpy.ndarray
        Strictly increasing radii starting at ``0``.
    zeta, psi, phi : numpy.ndarray
        ``sin`` of the slope angle, slope ``Phi'``, and height ``Phi`` at the
        nodes; ``phi[0] == 0``.
    method : str
        Name of the integrator that produced the profile.
    eps : float
        Regularization parameter (``0`` for the singular form).
    reached_cutoff : bool
        Whether integration stopped at the blow-up cutoff.
    r_inf : float | None
        Extrapolated maximal radius.
    r_inf_bracket : tuple[float, float] | None
        Enclosure of the maximal radius.
    phi_end : float | None
        Extrapolated height ``Phi(R_inf - 0)``.
    metadata : dict
        Integrator statistics and cross-check results.
    """

    params: FlowParams
    c: float
    regime: RegimeTag
    r_grid: np.ndarray
    zeta: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    method: str = "zeta"
    eps: float = 0.0
    reached_cutoff: bool = False
    r_inf: float | None = None
    r_inf_bracket: tuple[float, float] | None = None
    phi_end: float | None = None
    metadata: dict[str, Any] = field(default_factory=dict)
    dense: ProfileInterpolant | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        """Freeze the sample arrays."""
        for name in ("r_grid", "zeta", "psi", "phi"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def r_end(self) -> float:
        """Last integrated radius."""
        return float(self.r_grid[-1])

    @property
    def boundary_psi(self) -> float:
        """Slope at the last node, signed infinity after a blow-up."""
        if self.reached_cutoff:
            return math.copysign(math.inf, self.zeta[-1])
        return float(self.psi[-1])

    def _fields(self, r: Any) -> np.ndarray:
        if self.dense is not None:
            return self.dense(r)
        rr = np.atleast_1d(np.asarray(r, dtype=float))
        inside = (rr >= 0) & (rr <= self.r_end)
        out = np.vstack([np.interp(rr, self.r_grid, f) for f in (self.zeta, self.psi, self.phi)])
        out[:, ~inside] = np.nan
        return out

    def zeta_at(self, r: Any) -> Any:
        """Evaluate ``zeta`` at arbitrary radii inside the integrated range."""
        return _evaluate(self._fields(r)[0], r)

    def psi_at(self, r: Any) -> Any:
        """Evaluate ``Phi'`` at arbitrary radii inside the integrated range."""
        return _evaluate(self._fields(r)[1], r)

    def phi_at(self, r: Any) -> Any:
        """Evaluate ``Phi`` at arbitrary radii inside the integrated range."""
        return _evaluate(self._fields(r)[2], r)

    def psi_prime_at(self, r: Any) -> Any:
        """Evaluate ``Phi''`` from the profile equation."""
        from gmcf_translate.profiles._common import make_forcing

        rr = np.atleast_1d(np.asarray(r, dtype=float))
        psi = self._fields(rr)[1]
        forcing = make_forcing(self.params, self.c)
        N = self.params.N
        out = np.empty_like(rr)
        for i, (ri, pi) in enumerate(zip(rr, psi)):
            cos = 1.0 / math.sqrt(1.0 + pi * pi)
            zi = pi * cos
            if ri == 0 and self.eps == 0:
                dzeta = forcing(1.0) / N
            else:
                dzeta = forcing(cos) - (N - 1) * zi / (ri + self.eps)
            out[i] = dzeta / cos**3 if cos > 0 else math.copysign(math.inf, zi)
        return _evaluate(out, r)

    def replace(self, **changes: Any) -> ProfileSolution:
        """Return a copy with some fields replaced."""
        return dataclasses.replace(self, **changes)


class ProfileIntegrator(ABC):
    """Abstract base class for profile integrators.

    Subclass and implement :meth:`__call__` to provide another formulation
    of the profile equation. Register the subclass with
    :data:`INTEGRATOR_REGISTRY` to make it selectable by name.
    """

    name: str = "abstract"

    @abstractmethod
    def __call__(self, params: FlowParams, c: float, opts: IntegratorOptions) -> ProfileSolution:
        """Integrate the profile for speed *c*.

        Parameters
        ----------
        params : FlowParams
            Flow parameters.
        c : float
            Translation speed.
        opts : IntegratorOptions
            Integration controls.

        Returns
        -------
        ProfileSolution
        """


class IntegratorRegistry:
    """Registry mapping names to :class:`ProfileIntegrator` subclasses.

    Example
    -------
    >>> class MyIntegrator(ProfileIntegrator):
    ...     def __call__(self, params, c, opts):
    ...         ...
    >>> INTEGRATOR_REGISTRY.register("mine", MyIntegrator)
    """

    def __init__(self) -> None:
        self._registry: dict[str, type[ProfileIntegrator]] = {}

    def register(self, name: str, cls: type[ProfileIntegrator]) -> None:
        """Register an integrator class under *name*.

        Raises
        ------
        ValueError
            If *cls* is not a subclass of :class:`ProfileIntegrator`.
        """
        if not issubclass(cls, ProfileIntegrator):
            raise ValueError(f"{cls.__name__} must be a subclass of ProfileIntegrator")
        self._registry[name] = cls

    def get_class(self, name: str) -> type[ProfileIntegrator]:
        """Return the integrator class registered under *name*.

        Raises
        ------
        ValueError
            If *name* is not registered.
        """
        if name not in self._registry:
            available = sorted(self._registry)
            raise ValueError(f"Unknown integrator {name!r}. Available: {available}")
        return self._registry[name]

    def list(self) -> list[str]:
        """Return sorted list of registered integrator names."""
        return sorted(self._registry)


INTEGRATOR_REGISTRY = IntegratorRegistry()
