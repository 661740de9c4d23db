"""Command-line entry point.

Commands:

* ``validate <model>`` -- structural validation; exit 0 iff valid.
* ``analyze <model> [--scan] [--svg DIR] [--out DIR]`` -- centrality CSV,
  optional authority-assignment modularity scan, optional concentric plot.
* ``simulate <model> <scenario> [--svg DIR] [--out DIR]`` -- one run: event
  trace and trajectory CSVs, optional activity/trajectory plots.
* ``sweep <model> <scenario> [--currency a:b:step] [--lad v1,v2,...]
  [--edge FROM->TO] [--jobs N] [--out DIR] [--svg DIR]`` -- the strategy
  grid; emits sweep and frontier CSVs and an optional scatter plot.

Exit codes: 0 success (deadlocked runs inside sweeps are still success),
1 validation failure, 2 I/O or parse failure, 3 internal invariant breach.
The ``JSAT_JOBS`` environment variable overrides ``--jobs``.
"""

from __future__ import annotations

import argparse
import io
import os
import sys
from pathlib import Path

from .io import ModelFormatError, ModelValidationError, load_model
from .model import validate as validate_model
from .replay import replay_check
from .scenario import load_scenario
from .sim import run, trace_to_csv, trajectory_to_csv
from .svg import activity_svg, concentric_svg, sweep_svg, trajectory_svg
from .sweep import (
    DEFAULT_CURRENCIES,
    DEFAULT_LADS,
    SWEPT_EDGE_DEFAULT,
    SweepGrid,
    frontier,
    frontier_to_csv,
    run_sweep,
    sweep_to_csv,
)
from .topology import CentralityReport, RoleModularityScan, centrality, role_modularity_scan

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_INTERNAL = 3


def centrality_to_csv(report: CentralityReport) -> str:
    out = io.StringIO()
    out.write("node_id,kind,layer,in_degree,out_degree,eig_in,eig_out\n")
    for n in report.nodes:
        out.write(
            f"{n.node_id},{n.kind},{n.layer},{n.in_degree},{n.out_degree},"
            f"{n.eig_in:.12g},{n.eig_out:.12g}\n"
        )
    return out.getvalue()


def scan_to_csv(scan: RoleModularityScan) -> str:
    out = io.StringIO()
    out.write("override_bitmask,human_functions,Q\n")
    for row in scan.rows:
        out.write(f"{row.bitmask},{';'.join(row.human_functions)},{row.q:.12g}\n")
    return out.getvalue()


def _write(directory: Path, name: str, content: str) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    target = directory / name
    target.write_text(content, encoding="utf-8")
    return target


def _parse_currency_range(spec: str) -> tuple[float, ...]:
    try:
        lo, hi, step = (float(part) for part in spec.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected a:b:step") from exc
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("expected a <= b and step > 0")
    values = []
    v = lo
    while v <= hi + 1e-9:
        values.append(round(v, 9))
        v += step
    return tuple(values)


def _parse_lads(spec: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in spec.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected v1,v2,...") from exc


def cmd_validate(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    violations = validate_model(model)
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        return EXIT_INVALID
    print(f"valid: {len(model.functions)} functions, {len(model.resources)} resources, {len(model.edges)} edges")
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    out_dir = Path(args.out)
    report = centrality(model)
    print(_write(out_dir, "centrality.csv", centrality_to_csv(report)))
    if args.scan:
        scan = role_modularity_scan(model)
        print(_write(out_dir, "modularity_scan.csv", scan_to_csv(scan)))
    if args.svg:
        print(_write(Path(args.svg), "concentric.svg", concentric_svg(report)))
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    scenario = load_scenario(args.scenario)
    trace = run(model, scenario)
    out_dir = Path(args.out)
    print(_write(out_dir, "trace.csv", trace_to_csv(trace)))
    print(_write(out_dir, "trajectory.csv", trajectory_to_csv(trace)))
    report = replay_check(model, trace)
    if not report.ok:
        for issue in report.issues:
            print(f"invariant breach: {issue.kind} at t={issue.time}: {issue.detail}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.svg:
        svg_dir = Path(args.svg)
        print(_write(svg_dir, "activity.svg", activity_svg(trace, model)))
        print(_write(svg_dir, "trajectory.svg",
                     trajectory_svg(trace, scenario.true_map, scenario.start.point, scenario.goal)))
    print(f"termination={trace.termination} time={trace.final_time:.3f}s "
          f"distance={trace.distance_m:.3f}m exchanges={trace.count('exchange')} "
          f"unsafe={trace.count('unsafe-entry')}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    scenario = load_scenario(args.scenario)
    grid = SweepGrid(currency_values=args.currency, lad_values=args.lad, swept_edge=args.edge)
    jobs = int(os.environ.get("JSAT_JOBS", args.jobs))
    result = run_sweep(model, scenario, grid, jobs=max(1, jobs))
    front = frontier(result.rows)
    out_dir = Path(args.out)
    print(_write(out_dir, "sweep.csv", sweep_to_csv(result.rows)))
    print(_write(out_dir, "frontier.csv", frontier_to_csv(front)))
    if args.svg:
        print(_write(Path(args.svg), "sweep.svg", sweep_svg(result.rows, front)))
    completed = sum(1 for r in result.rows if r.termination == "goal")
    print(f"{len(result.rows)} runs, {completed} reached the goal")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jsat",
        description="Work-graph analysis and fast-time coordination simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a model file")
    p_validate.add_argument("model")
    p_validate.set_defaults(func=cmd_validate)

    p_analyze = sub.add_parser("analyze", help="centrality and modularity reports")
    p_analyze.add_argument("model")
    p_analyze.add_argument("--scan", action="store_true", help="emit the authority-assignment modularity scan")
    p_analyze.add_argument("--svg", metavar="DIR", help="emit the concentric centrality plot")
    p_analyze.add_argument("--out", default=".", metavar="DIR")
    p_analyze.set_defaults(func=cmd_analyze)

    p_sim = sub.add_parser("simulate", help="run one scenario")
    p_sim.add_argument("model")
    p_sim.add_argument("scenario")
    p_sim.add_argument("--svg", metavar="DIR", help="emit activity and trajectory plots")
    p_sim.add_argument("--out", default=".", metavar="DIR")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run the strategy trade-space grid")
    p_sweep.add_argument("model")
    p_sweep.add_argument("scenario")
    p_sweep.add_argument("--currency", type=_parse_currency_range, default=DEFAULT_CURRENCIES,
                         metavar="A:B:STEP")
    p_sweep.add_argument("--lad", type=_parse_lads, default=DEFAULT_LADS, metavar="V1,V2,...")
    p_sweep.add_argument("--edge", default=SWEPT_EDGE_DEFAULT, metavar="FROM->TO",
                         help="edge whose currency requirement is swept")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--out", default=".", metavar="DIR")
    p_sweep.add_argument("--svg", metavar="DIR", help="emit the trade-space scatter plot")
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ModelValidationError as exc:
        for violation in exc.violations:
            print(violation, file=sys.stderr)
        return EXIT_INVALID
    except (ModelFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
