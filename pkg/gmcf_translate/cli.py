"""Command-line interface: ``gmcf-translate <subcommand> [flags]``.

Exit codes: 0 success, 1 numerical failure, 2 invalid input or rejected
regime, 3 loss of parabolicity during an evolution.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np

from gmcf_translate import artifacts
from gmcf_translate.config import RunConfig, config_dict, load_config
from gmcf_translate.core import FlowParams
from gmcf_translate.diagnostics import (
    CaseCMonitor,
    EventLog,
    IntersectionMonitor,
    curvature_floor,
    initial_velocity_bounds,
)
from gmcf_translate.evolve import (
    Hypothesis,
    InitialData,
    check_hypotheses,
    evolve,
    init_state,
    perturbed_profile_data,
    profile_data,
    quadratic_data,
)
from gmcf_translate.exceptions import GMCFError, NotApplicable, exit_code_for
from gmcf_translate.models import TravelingReference
from gmcf_translate.profiles import IntegratorOptions, attach_r_infinity, integrate_zeta, solve_profile
from gmcf_translate.speed import SpeedResult, find_speed, psi_at_one
from gmcf_translate.verify import format_table, run_suite

logger = logging.getLogger(__name__)


def _add_common(parser: argparse.ArgumentParser, with_params: bool = True) -> None:
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--output-dir", dest="output_dir", help="directory for output files")
    parser.add_argument("--seed", type=int, help="random seed recorded in every artifact")
    parser.add_argument("--tol", type=float, help="integrator tolerance")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    if with_params:
        parser.add_argument("--n", type=int, help="spatial dimension N")
        parser.add_argument("--alpha", type=float, help="curvature exponent")
        parser.add_argument("--alpha-odd", dest="alpha_odd", help="odd-rational exponent q/p")
        parser.add_argument("--b", type=float, help="forcing term")


def _add_slope(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--k", type=float, help="boundary slope")
    group.add_argument("--k-inf", dest="k_inf", choices=("+", "-"), help="vertical boundary slope")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(prog="gmcf-translate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="integrate the profile for one speed")
    _add_common(p)
    p.add_argument("--c", type=float, help="translation speed")
    p.add_argument("--no-cross-check", dest="cross_check", action="store_false", help="skip the oracle comparison")

    p = sub.add_parser("speed", help="select the speed for a boundary slope")
    _add_common(p)
    _add_slope(p)

    p = sub.add_parser("evolve", help="evolve initial data towards the translating solution")
    _add_common(p)
    p.add_argument("--k", type=float, help="boundary slope")
    p.add_argument("--preset", choices=("ts", "quadratic", "perturbed-ts"), help="initial data preset")
    p.add_argument("--u0", help="CSV file with columns r,u")
    p.add_argument("--M", type=int, help="number of grid intervals")
    p.add_argument("--T", type=float, help="final time")
    p.add_argument("--sample-interval", dest="sample_interval", type=float, help="time between samples")
    p.add_argument("--cfl", type=float, help="Courant factor")
    p.add_argument("--amplitude", type=float, help="perturbation amplitude for perturbed-ts")
    p.add_argument("--monitor-c", dest="monitor_c", type=float, help="speed of the intersection family")
    p.add_argument("--allow-unverified", dest="allow_unverified", action="store_true", default=None)

    p = sub.add_parser("verify", help="run the acceptance suite")
    _add_common(p, with_params=False)
    p.add_argument("--only", action="append", help="criterion or group (repeatable)")
    p.add_argument("--quick", action="store_true", help="coarse grids and shorter runs")

    p = sub.add_parser("sweep", help="sweep the speed or the boundary slope")
    _add_common(p)
    p.add_argument("--over", choices=("c", "k"), help="swept quantity")
    p.add_argument("--start", type=float)
    p.add_argument("--stop", type=float)
    p.add_argument("--num", type=int)
    p.add_argument("--workers", type=int, help="worker processes (default: machine parallelism)")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    values = vars(args)
    top = {key: values.get(key) for key in ("n", "alpha", "alpha_odd", "b", "c", "k", "k_inf", "output_dir", "seed")}
    top["workers"] = values.get("workers")
    top["integrator"] = {"tol": values.get("tol")}
    evolve_keys = ("preset", "u0", "M", "T", "sample_interval", "cfl", "amplitude", "allow_unverified", "monitor_c")
    top["evolve"] = {key: values.get(key) for key in evolve_keys}
    if values.get("u0") is not None:
        top["evolve"]["preset"] = "csv"
    top["sweep"] = {key: values.get(key) for key in ("over", "start", "stop", "num")}
    return top


def _output_dir(cfg: RunConfig) -> Path:
    path = Path(cfg.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


# -- subcommands -------------------------------------------------------------


def cmd_profile(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Integrate one profile and write ``profile.csv``, ``profile.json`` and ``profile.plt``."""
    if cfg.c is None:
        raise ValueError("--c is required for profile")
    sol = solve_profile(cfg.flow_params(), cfg.c, cfg.integrator_options(), cross_check=args.cross_check)
    out = _output_dir(cfg)
    artifacts.write_profile_csv(out / "profile.csv", sol)
    artifacts.write_json(out / "profile.json", artifacts.profile_document(sol, config_dict(cfg)))
    artifacts.write_gnuplot(
        out / "profile.plt", "profile.csv", "r", ["phi"], artifacts.PROFILE_COLUMNS, title=f"c = {cfg.c:g}"
    )
    print(f"regime={sol.regime.value} r_end={sol.r_end:.12g} r_inf={sol.r_inf}")
    return 0


def cmd_speed(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Select the speed and write ``speed.json`` plus the profile on ``[0, 1]``."""
    params = cfg.flow_params()
    if params.k is None:
        raise ValueError("--k or --k-inf is required for speed")
    opts = cfg.integrator_options()
    result = find_speed(params, tol=opts.tol, opts=opts)
    out = _output_dir(cfg)
    artifacts.write_profile_csv(out / "speed_profile.csv", result.profile)
    artifacts.write_json(out / "speed.json", artifacts.speed_document(result, config_dict(cfg)))
    artifacts.write_gnuplot(
        out / "speed_profile.plt",
        "speed_profile.csv",
        "r",
        ["phi"],
        artifacts.PROFILE_COLUMNS,
        title="translating solution",
    )
    print(f"case={result.case_tag} c_tilde={result.c_tilde:.15g}")
    return 0


def _initial_data(cfg: RunConfig, params: FlowParams) -> tuple[InitialData, SpeedResult | None]:
    settings = cfg.evolve
    preset = settings["preset"]
    if preset == "csv":
        if settings["u0"] is None:
            raise ValueError("evolve.preset 'csv' needs --u0")
        return artifacts.load_initial_csv(settings["u0"]), None
    if preset == "quadratic":
        return quadratic_data(float(params.k)), None
    result = find_speed(params, opts=cfg.integrator_options())
    data = profile_data(result.profile)
    if preset == "perturbed-ts":
        data = perturbed_profile_data(result.profile, settings["amplitude"])
    return data, result


def _monitor_speed(cfg: RunConfig, params: FlowParams, c_tilde: float) -> float:
    c = cfg.evolve["monitor_c"]
    if c is None:
        c = params.b + 0.1 * (c_tilde - params.b)
        if c <= 0:
            c = 0.5 * c_tilde
    return c


def cmd_evolve(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Evolve initial data and write trajectory, convergence and estimate files."""
    params = cfg.flow_params()
    settings = cfg.evolve
    data, speed_result = _initial_data(cfg, params)
    state = init_state(data, params, M=settings["M"])
    tag = check_hypotheses(state)
    opts = cfg.integrator_options()
    if speed_result is None:
        speed_result = find_speed(params, opts=opts)
    c_tilde = speed_result.c_tilde
    reference = TravelingReference(c_tilde=c_tilde, phi=np.asarray(speed_result.profile.phi_at(state.r_grid)))

    events = EventLog()
    c_mon = _monitor_speed(cfg, params, c_tilde)
    family = integrate_zeta(params, c_mon, opts.replace(r_max=1.0))
    intersections = IntersectionMonitor(family.phi_at(state.r_grid), c_mon, settings["shifts"], events)
    observers: list[Any] = [intersections]
    case_c = None
    if tag.case is Hypothesis.C:
        floor, slope = curvature_floor(params, c_tilde, state.r_grid, opts)
        case_c = CaseCMonitor(floor, slope, events)
        observers.append(case_c)

    snapshots: list[Any] = []
    final, record, report = evolve(
        state,
        settings["T"],
        observers=observers,
        reference=reference,
        sample_interval=settings["sample_interval"],
        cfl=settings["cfl"],
        allow_unverified=settings["allow_unverified"],
        snapshots=snapshots,
    )

    try:
        bounds = initial_velocity_bounds(params, state.ur, state.H, state.ut)
    except NotApplicable:
        bounds = None
    out = _output_dir(cfg)
    config = config_dict(cfg)
    artifacts.write_trajectory_csv(out / "trajectory.csv", snapshots)
    rows = record.rows()
    columns = tuple(rows[0])
    artifacts.write_csv(out / "convergence.csv", columns, np.array([[row[c] for c in columns] for row in rows]))
    artifacts.write_gnuplot(
        out / "convergence.plt",
        "convergence.csv",
        "times",
        ["oscillation", "drift_corrected"],
        columns,
        title="distance to the translating solution",
    )
    artifacts.write_json(
        out / "convergence.json",
        artifacts.envelope(
            "convergence",
            config,
            initial_data=data.label,
            hypothesis={"case": tag.case, "witnessed": list(tag.witnessed)},
            c_tilde=c_tilde,
            steps=final.step_count,
            record=record.to_dict(),
            intersections=intersections.trace.to_dict(),
            case_c=None if case_c is None else {"floor": case_c.floor, "violations": case_c.violations},
        ),
    )
    artifacts.write_json(
        out / "estimates.json",
        artifacts.envelope("estimates", config, report=report.to_dict(), initial_bounds=bounds),
    )
    events.write(out / "events.jsonl")
    print(f"case={tag.case.value} c_tilde={c_tilde:.15g} oscillation={record.oscillation[-1]:.3e}")
    return 0


def cmd_verify(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Run the acceptance suite; exit 0 iff every selected criterion passes."""
    rows = run_suite(args.only, quick=args.quick, seed=cfg.seed)
    out = _output_dir(cfg)
    document = artifacts.envelope("verify", config_dict(cfg), quick=args.quick, results=rows)
    artifacts.write_json(out / "verify.json", document)
    print(format_table(rows))
    return 0 if all(row["passed"] for row in rows) else 1


def sweep_point(task: tuple[str, FlowParams, float, IntegratorOptions]) -> dict[str, Any]:
    """Evaluate one sweep point; top-level so worker processes can import it."""
    over, params, value, opts = task
    if over == "c":
        sol = attach_r_infinity(integrate_zeta(params, value, opts))
        return {"c": value, "regime": sol.regime.value, "r_inf": sol.r_inf, "psi_one": psi_at_one(sol)}
    result = find_speed(params, k=value, tol=opts.tol, opts=opts)
    return {"k": value, "case": result.case_tag, "c_tilde": result.c_tilde}


def cmd_sweep(cfg: RunConfig, args: argparse.Namespace) -> int:
    """Sweep ``c`` (maximal radius, regime, boundary slope) or ``k`` (selected speed)."""
    settings = cfg.sweep
    if settings["values"] is not None:
        values = [float(v) for v in settings["values"]]
    else:
        values = [float(v) for v in np.linspace(settings["start"], settings["stop"], settings["num"])]
    if not values:
        raise ValueError("the sweep grid is empty")
    over = settings["over"]
    params = cfg.flow_params().replace(k=None)
    tasks = [(over, params, v, cfg.integrator_options()) for v in values]
    if cfg.workers == 1:
        rows = [sweep_point(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(sweep_point, tasks))

    out = _output_dir(cfg)
    numeric = ("c", "r_inf", "psi_one") if over == "c" else ("k", "c_tilde")
    table = np.array([[np.nan if row[c] is None else row[c] for c in numeric] for row in rows], dtype=float)
    artifacts.write_csv(out / "sweep.csv", numeric, table)
    artifacts.write_gnuplot(
        out / "sweep.plt", "sweep.csv", numeric[0], [numeric[1]], numeric, title=f"sweep over {over}"
    )
    artifacts.write_json(out / "sweep.json", artifacts.envelope("sweep", config_dict(cfg), rows=rows))
    print(f"{len(rows)} points written to {out / 'sweep.csv'}")
    return 0


COMMANDS = {
    "profile": cmd_profile,
    "speed": cmd_speed,
    "evolve": cmd_evolve,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def _report_error(exc: BaseException) -> int:
    code = exit_code_for(exc)
    print(f"error code={code} kind={type(exc).__name__} message={json.dumps(str(exc))}", file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``gmcf-translate`` console script."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config, _overrides(args))
        return COMMANDS[args.command](cfg, args)
    except (GMCFError, ValueError, FileNotFoundError) as exc:
        logger.debug("command %s failed", args.command, exc_info=True)
        return _report_error(exc)


if __name__ == "__main__":
    sys.exit(main())
