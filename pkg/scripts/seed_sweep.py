#!/usr/bin/env python3
"""Sweep a scenario over many seeds and summarize the headline metrics.

Usage: python3 scripts/seed_sweep.py [--scenario PATH] [--seeds N]
"""
import argparse
import io
import pathlib
import statistics
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from rescuenet.metrics import compute_metrics
from rescuenet.scenario import load_scenario
from rescuenet.sim import run_simulation

ROOT = pathlib.Path(__file__).resolve().parents[1]
S1 = ROOT / "scenarios" / "s1.scenario"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", default=str(S1))
    parser.add_argument("--seeds", type=int, default=20)
    args = parser.parse_args()

    coverage, red, rescued, drops = [], [], [], []
    for seed in range(args.seeds):
        sc = load_scenario(args.scenario)
        buf = io.StringIO()
        run_simulation(sc, trace_out=buf, seed=seed)
        report = compute_metrics(buf.getvalue().splitlines())
        if report.first_full_coverage_ms is not None:
            coverage.append(report.first_full_coverage_ms)
        if report.red_alarm_ms is not None:
            red.append(report.red_alarm_ms)
        if report.rescued_fraction is not None:
            rescued.append(report.rescued_fraction)
        drops.append(report.dropped_message_count)

    def show(label, values, unit=""):
        if not values:
            print(f"{label}: n/a")
            return
        print(f"{label}: mean {statistics.fmean(values):.1f}{unit} "
              f"min {min(values)}{unit} max {max(values)}{unit} "
              f"(n={len(values)})")

    show("full coverage", coverage, "ms")
    show("red alarm", red, "ms")
    show("rescued fraction", [round(v, 3) for v in rescued])
    show("dropped messages", drops)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
