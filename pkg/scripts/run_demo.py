#!/usr/bin/env python3
"""Run the reference scenario and print its metrics report.

Usage: python3 scripts/run_demo.py [--seed N] [--trace PATH]
"""
import argparse
import io
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from rescuenet.metrics import compute_metrics, report_text
from rescuenet.scenario import load_scenario
from rescuenet.sim import run_simulation

ROOT = pathlib.Path(__file__).resolve().parents[1]
S1 = ROOT / "scenarios" / "s1.scenario"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=str(S1))
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--trace", default=None,
                        help="also write the trace to this file")
    args = parser.parse_args()

    sc = load_scenario(args.scenario)
    buf = io.StringIO()
    run_simulation(sc, trace_out=buf, seed=args.seed, check_invariants=True)
    text = buf.getvalue()
    if args.trace:
        pathlib.Path(args.trace).write_text(text)
        print(f"trace: {args.trace} ({len(text.splitlines())} records)")
    sys.stdout.write(report_text(compute_metrics(text.splitlines())))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
