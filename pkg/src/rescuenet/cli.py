"""Command-line surface: validate scenarios, run simulations, report on traces.

Exit codes are a stable contract: 0 success, 1 input error, 2 internal error,
3 invariant violation (with --check-invariants).
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional

from .engine import InvariantViolation
from .metrics import TraceFormatError, compute_metrics, report_csv, report_text
from .scenario import ScenarioError, load_scenario
from .sim import run_simulation

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2
EXIT_INVARIANT = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rescuenet",
        description="Deterministic rescue-network simulator for earthquake response studies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="parse and validate a scenario file")
    p_val.add_argument("--scenario", required=True, help="scenario file path")

    p_run = sub.add_parser("run", help="run a scenario and write its trace")
    p_run.add_argument("--scenario", required=True, help="scenario file path")
    p_run.add_argument("--seed", type=int, default=None, help="override the run seed")
    p_run.add_argument("--until", type=int, default=None, metavar="MS",
                       help="override the end time in milliseconds")
    p_run.add_argument("--trace", default=None, metavar="PATH",
                       help="trace output path (default: stdout)")
    p_run.add_argument("--check-invariants", action="store_true",
                       help="assert runtime invariants at every dispatch")

    p_rep = sub.add_parser("report", help="compute metrics from a trace")
    p_rep.add_argument("--trace", required=True, metavar="PATH", help="trace file path")
    p_rep.add_argument("--csv", default=None, metavar="PATH",
                       help="also write the metrics CSV here (default: stdout)")
    return parser


def _cmd_validate(args) -> int:
    sc = load_scenario(args.scenario)
    print(f"scenario OK: {sc.width}x{sc.height} grid, {len(sc.zones)} zones, "
          f"{len(sc.drones)} drones, {len(sc.sensors)} sensors, seed {sc.run.seed}")
    return EXIT_OK


def _cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    if args.until is not None and args.until < 0:
        raise ScenarioError("--until must be non-negative")
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        raise ScenarioError("--seed must fit in 64 bits")
    out = open(args.trace, "w", encoding="utf-8") if args.trace else sys.stdout
    try:
        run_simulation(sc, trace_out=out, seed=args.seed, t_end_ms=args.until,
                       check_invariants=args.check_invariants)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _cmd_report(args) -> int:
    try:
        with open(args.trace, "r", encoding="utf-8") as fh:
            report = compute_metrics(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read trace file: {exc}")
    sys.stdout.write(report_text(report))
    csv_text = report_csv(report)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"validate": _cmd_validate, "run": _cmd_run, "report": _cmd_report}
    try:
        return handlers[args.command](args)
    except (ScenarioError, TraceFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except Exception as exc:  # noqa: BLE001 - the exit-code contract needs a catch-all
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
