"""Readers and writers for run artifacts.

CSV files use ``.`` as decimal separator, 15 significant digits and LF
line endings. JSON documents are written with sorted keys and carry the
schema version and the resolved configuration.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Mapping, Sequence
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from gmcf_translate.evolve import EvolutionState, InitialData
from gmcf_translate.profiles import ProfileSolution

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "gmcf-translate/1"
CSV_FORMAT = "%.15g"
PROFILE_COLUMNS = ("r", "zeta", "psi", "phi")
TRAJECTORY_COLUMNS = ("t", "r", "u", "ur", "urr", "H")


def to_serializable(value: Any) -> Any:
    """Convert numpy scalars, arrays, enums and tuples into JSON-ready values.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``.
    """
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Mapping):
        return {str(k): to_serializable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_serializable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_serializable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: str | Path, document: Mapping[str, Any]) -> Path:
    """Write *document* as sorted, indented JSON."""
    path = Path(path)
    text = json.dumps(to_serializable(document), sort_keys=True, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8", newline="\n")
    logger.debug("wrote %s", path)
    return path


def write_csv(path: str | Path, columns: Sequence[str], data: np.ndarray) -> Path:
    """Write a numeric table with a header line.

    Raises
    ------
    ValueError
        If the number of columns does not match *data*.
    """
    path = Path(path)
    data = np.atleast_2d(np.asarray(data, dtype=float))
    if data.shape[1] != len(columns):
        raise ValueError(f"{len(columns)} column names for a table with {data.shape[1]} columns")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        np.savetxt(fh, data, fmt=CSV_FORMAT, delimiter=",", header=",".join(columns), comments="", newline="\n")
    logger.debug("wrote %s (%d rows)", path, data.shape[0])
    return path


def envelope(kind: str, config: Mapping[str, Any], **body: Any) -> dict[str, Any]:
    """Common document frame: schema version, kind, resolved config and seed."""
    return {"schema_version": SCHEMA_VERSION, "kind": kind, "config": dict(config), "seed": config.get("seed"), **body}


# -- profiles ----------------------------------------------------------------


def write_profile_csv(path: str | Path, sol: ProfileSolution) -> Path:
    """Write the profile nodes as ``r,zeta,psi,phi``."""
    return write_csv(path, PROFILE_COLUMNS, np.column_stack([sol.r_grid, sol.zeta, sol.psi, sol.phi]))


def profile_document(sol: ProfileSolution, config: Mapping[str, Any]) -> dict[str, Any]:
    """Summary of a profile run."""
    return envelope(
        "profile",
        config,
        params=sol.params.to_dict(),
        c=sol.c,
        regime=sol.regime,
        method=sol.method,
        eps=sol.eps,
        r_end=sol.r_end,
        reached_cutoff=sol.reached_cutoff,
        r_inf=sol.r_inf,
        r_inf_bracket=sol.r_inf_bracket,
        phi_end=sol.phi_end,
        nodes=int(sol.r_grid.size),
        metadata=sol.metadata,
    )


def speed_document(result: Any, config: Mapping[str, Any]) -> dict[str, Any]:
    """Summary of a speed selection (a :class:`~gmcf_translate.speed.SpeedResult`)."""
    return envelope(
        "speed",
        config,
        params=result.params.to_dict(),
        c_tilde=result.c_tilde,
        case=result.case_tag,
        residual=result.residual,
        iterations=result.iterations,
        bracket_history=[[lo, hi, payload] for lo, hi, payload in result.bracket_history],
        r_inf=result.profile.r_inf,
    )


# -- evolution ---------------------------------------------------------------


def write_trajectory_csv(path: str | Path, snapshots: Sequence[EvolutionState]) -> Path:
    """Write snapshots in long format ``t,r,u,ur,urr,H``."""
    if not snapshots:
        raise ValueError("no snapshots to write")
    blocks = [
        np.column_stack([np.full(s.r_grid.size, s.t), s.r_grid, s.u, s.ur, s.urr, s.H]) for s in snapshots
    ]
    return write_csv(path, TRAJECTORY_COLUMNS, np.vstack(blocks))


def load_initial_csv(path: str | Path) -> InitialData:
    """Read initial data from a CSV file with header ``r,u``.

    Raises
    ------
    FileNotFoundError
        If *path* does not exist.
    ValueError
        If the header or the samples are malformed.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Initial data file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        header = [name.strip() for name in fh.readline().split(",")]
    if header[:2] != ["r", "u"]:
        raise ValueError(f"initial data header must start with 'r,u', got {','.join(header)!r}")
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return InitialData.from_samples(table[:, 0], table[:, 1], label=f"csv:{path.name}")


# -- gnuplot -----------------------------------------------------------------


def write_gnuplot(
    path: str | Path,
    data_file: str,
    x: str,
    series: Sequence[str],
    columns: Sequence[str],
    title: str = "",
    logscale: bool = False,
) -> Path:
    """Write a gnuplot script plotting *series* against *x* from a CSV file.

    Raises
    ------
    ValueError
        If a requested column is not in *columns*.
    """
    index = {name: i + 1 for i, name in enumerate(columns)}
    missing = [name for name in (x, *series) if name not in index]
    if missing:
        raise ValueError(f"unknown columns {missing}; available {list(columns)}")
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title {json.dumps(title)}",
        f"set xlabel {json.dumps(x)}",
    ]
    if logscale:
        lines.append("set logscale xy")
    plots = [f"{json.dumps(data_file)} using {index[x]}:{index[name]} with lines" for name in series]
    lines.append("plot " + ", \\\n     ".join(plots))
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path
