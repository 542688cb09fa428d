"""Parse-once configuration for command-line runs."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from gmcf_translate.core import FlowParams, InfiniteSlope, Slope
from gmcf_translate.profiles import IntegratorOptions

OUTPUT_ROOT_ENV = "GMCF_OUTPUT_ROOT"

_CONFIG_FIELDS = {
    "n",
    "alpha",
    "alpha_odd",
    "b",
    "c",
    "k",
    "k_inf",
    "output_dir",
    "seed",
    "workers",
    "integrator",
    "evolve",
    "sweep",
}
_INTEGRATOR_FIELDS = {f.name for f in dataclasses.fields(IntegratorOptions)}
EVOLVE_DEFAULTS: dict[str, Any] = {
    "preset": "quadratic",
    "u0": None,
    "M": 256,
    "T": 1.0,
    "sample_interval": None,
    "cfl": 0.2,
    "amplitude": 0.1,
    "allow_unverified": False,
    "monitor_c": None,
    "shifts": [-0.5, -0.25, 0.0, 0.25, 0.5],
}
SWEEP_DEFAULTS: dict[str, Any] = {"over": "c", "start": 0.1, "stop": 5.0, "num": 20, "values": None}
_PRESETS = {"ts", "quadratic", "perturbed-ts", "csv"}


def parse_alpha_odd(value: Any) -> tuple[int, int] | None:
    """Parse ``"q/p"`` or ``[q, p]`` into a pair of integers."""
    if value is None:
        return None
    if isinstance(value, str):
        parts = value.split("/")
        if len(parts) != 2:
            raise ValueError(f"alpha_odd must look like 'q/p', got {value!r}")
        value = parts
    try:
        q, p = (int(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"alpha_odd must be a pair of integers, got {value!r}") from exc
    return q, p


@dataclass
class RunConfig:
    """Validated run configuration.

    Parameters
    ----------
    n : int
        Spatial dimension ``N`` (``>= 2``).
    alpha : float | None
        Curvature exponent; derived from ``alpha_odd`` when omitted, else ``1``.
    alpha_odd : tuple[int, int] | None
        Odd-rational representation ``q/p`` of ``alpha``.
    b : float
        Forcing term.
    c : float | None
        Speed for profile runs.
    k : float | None
        Finite boundary slope.
    k_inf : str | None
        ``"+"`` or ``"-"`` for a vertical boundary slope.
    output_dir : str
        Output directory, resolved to an absolute path.
    seed : int
        Seed for randomized initial data and acceptance samples.
    workers : int | None
        Worker processes for sweeps; machine parallelism when ``None``.
    integrator : dict
        Overrides of :class:`~gmcf_translate.profiles.IntegratorOptions`.
    evolve : dict
        Evolution settings, see ``EVOLVE_DEFAULTS``.
    sweep : dict
        Sweep settings, see ``SWEEP_DEFAULTS``.
    """

    n: int = 2
    alpha: float | None = None
    alpha_odd: tuple[int, int] | None = None
    b: float = 0.0
    c: float | None = None
    k: float | None = None
    k_inf: str | None = None
    output_dir: str = "."
    seed: int = 0
    workers: int | None = None
    integrator: dict[str, Any] = field(default_factory=dict)
    evolve: dict[str, Any] = field(default_factory=dict)
    sweep: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate configuration values and fill defaults."""
        self.alpha_odd = parse_alpha_odd(self.alpha_odd)
        if self.alpha is None:
            self.alpha = 1.0 if self.alpha_odd is None else self.alpha_odd[0] / self.alpha_odd[1]
        if self.k is not None and self.k_inf is not None:
            raise ValueError(f"k and k_inf are mutually exclusive, got k={self.k}, k_inf={self.k_inf!r}")
        if self.k_inf is not None and self.k_inf not in ("+", "-"):
            raise ValueError(f"k_inf must be '+' or '-', got {self.k_inf!r}")
        if self.workers is not None and self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        unknown = self.integrator.keys() - _INTEGRATOR_FIELDS
        if unknown:
            raise ValueError(f"unknown integrator keys {sorted(unknown)}; allowed {sorted(_INTEGRATOR_FIELDS)}")
        self.evolve = _merge("evolve", EVOLVE_DEFAULTS, self.evolve)
        self.sweep = _merge("sweep", SWEEP_DEFAULTS, self.sweep)
        if self.evolve["preset"] not in _PRESETS:
            raise ValueError(f"evolve.preset must be one of {sorted(_PRESETS)}, got {self.evolve['preset']!r}")
        if self.sweep["over"] not in ("c", "k"):
            raise ValueError(f"sweep.over must be 'c' or 'k', got {self.sweep['over']!r}")
        self.output_dir = str(Path(os.environ.get(OUTPUT_ROOT_ENV, "."), self.output_dir).resolve())
        if self.evolve["u0"] is not None:
            self.evolve["u0"] = str(Path(self.evolve["u0"]).resolve())
        # validates N, alpha, b and the sign rules
        self.flow_params()

    @property
    def slope(self) -> Slope | None:
        """Boundary slope, infinite when ``k_inf`` is set."""
        if self.k_inf is not None:
            return InfiniteSlope.POS if self.k_inf == "+" else InfiniteSlope.NEG
        return self.k

    def flow_params(self) -> FlowParams:
        """Build the flow parameters."""
        return FlowParams(N=self.n, alpha=float(self.alpha), b=self.b, k=self.slope, alpha_odd=self.alpha_odd)

    def integrator_options(self) -> IntegratorOptions:
        """Build the integrator controls."""
        return IntegratorOptions(**self.integrator)


def _merge(name: str, defaults: dict[str, Any], values: dict[str, Any]) -> dict[str, Any]:
    unknown = values.keys() - defaults.keys()
    if unknown:
        raise ValueError(f"unknown {name} keys {sorted(unknown)}; allowed {sorted(defaults)}")
    return {**defaults, **values}


def load_config(
    source: str | Path | dict[str, Any] | None = None, overrides: dict[str, Any] | None = None
) -> RunConfig:
    """Load run configuration from a YAML file or dict, then apply overrides.

    Parameters
    ----------
    source : str | Path | dict, optional
        A path to a YAML file or a raw dict. A ``gmcf:`` section is used
        when present, otherwise the whole mapping.
    overrides : dict, optional
        Values taken over the file values (command-line flags); ``None``
        entries are ignored, nested mappings are merged.

    Returns
    -------
    RunConfig
        Fully validated configuration.

    Raises
    ------
    ValueError
        If keys are unknown or values invalid.
    FileNotFoundError
        If the YAML file does not exist.
    """
    if source is None:
        raw: dict[str, Any] = {}
    elif isinstance(source, dict):
        raw = source
    else:
        path = Path(source)
        if not path.is_file():
            raise FileNotFoundError(f"Config file not found: {path}")
        raw = _load_yaml(path)

    section = dict(raw.get("gmcf", raw))
    extra_keys = section.keys() - _CONFIG_FIELDS
    if extra_keys:
        raise ValueError(f"unknown config keys {sorted(extra_keys)}")

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if isinstance(value, dict):
            section[key] = {**section.get(key, {}), **{k: v for k, v in value.items() if v is not None}}
        else:
            section[key] = value
    overrides = overrides or {}
    for flag, other in (("k", "k_inf"), ("k_inf", "k")):
        if overrides.get(flag) is not None and overrides.get(other) is None:
            section.pop(other, None)
    return RunConfig(**section)


def config_dict(cfg: RunConfig) -> dict[str, Any]:
    """Resolved configuration as embedded in every output document."""
    return dataclasses.asdict(cfg)


def _load_yaml(path: Path) -> dict[str, Any]:
    """Load YAML file using PyYAML."""
    with open(path, encoding="utf-8") as fh:
        return yaml.safe_load(fh) or {}
