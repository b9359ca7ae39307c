"""Post-hoc reporting: one pass over a trace, a fixed set of metrics, CSV out.

Metric definitions (the contract tests assert on):
  first_full_coverage_ms   earliest time by which every zone in the scenario has
                           at least one coverage_up message sent for it
  failover_latency_ms      per failure notice: notice time minus the failed
                           drone's fail-record time, in notice order
  detection_latency_ms     per-sensor first alert minus the main quake time;
                           min/median/max over sensors that alerted
  rescued_fraction         survivors freed by rescue records / total trapped
  satellite_fallback_count deliveries whose path used a satellite leg and whose
                           msg_id also appears in a drop record (the terrestrial
                           copy died)
  dropped_message_count    total msg_drop records
  red_alarm_ms             time of the first red record

Empty values render as blank CSV fields. The CSV is byte-stable: fixed row
order, repr() number formatting.
"""
from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .scenario import parse_scenario_text

_REQUIRED_KEYS = ("t_ms", "seq", "actor", "kind", "payload")

CSV_HEADER = "metric,value"


class TraceFormatError(Exception):
    def __init__(self, message: str, line_no: int):
        self.line_no = line_no
        super().__init__(f"trace line {line_no}: {message}")


@dataclass
class MetricsReport:
    first_full_coverage_ms: Optional[int] = None
    failover_latency_ms: list[int] = field(default_factory=list)
    detection_latency_min_ms: Optional[int] = None
    detection_latency_median_ms: Optional[float] = None
    detection_latency_max_ms: Optional[int] = None
    rescued_fraction: Optional[float] = None
    satellite_fallback_count: int = 0
    dropped_message_count: int = 0
    red_alarm_ms: Optional[int] = None


def iter_records(lines: Iterable[str]):
    """Parse trace lines, yielding (line_no, record). Raises TraceFormatError."""
    for line_no, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"not valid JSON ({exc.msg})", line_no) from exc
        if not isinstance(rec, dict) or any(k not in rec for k in _REQUIRED_KEYS):
            raise TraceFormatError("missing required record fields", line_no)
        yield line_no, rec


def compute_metrics(lines: Iterable[str]) -> MetricsReport:
    report = MetricsReport()
    zones_pending: Optional[set[str]] = None
    quake_ms: Optional[int] = None
    trapped_total = 0
    freed_total = 0
    fail_ms: dict[str, int] = {}
    noticed: set[str] = set()
    first_alert: dict[str, int] = {}
    dropped_ids: set[str] = set()
    sat_deliveries: list[str] = []

    for _line_no, rec in iter_records(lines):
        kind = rec["kind"]
        t = rec["t_ms"]
        p = rec["payload"]
        if kind == "header":
            sc = parse_scenario_text(p["scenario"])
            zones_pending = {z.zone_id for z in sc.zones}
        elif kind == "quake" and not p.get("aftershock") and quake_ms is None:
            quake_ms = t
            trapped_total = p.get("trapped_total", 0)
        elif kind == "msg_send" and p.get("msg_kind") == "coverage_up":
            if zones_pending:
                zones_pending.discard(p["body"].get("zone"))
                if not zones_pending and report.first_full_coverage_ms is None:
                    report.first_full_coverage_ms = t
        elif kind == "alert":
            first_alert.setdefault(rec["actor"], t)
        elif kind == "fail":
            fail_ms.setdefault(rec["actor"], t)
        elif kind == "failure_notice":
            drone = p.get("drone")
            if drone in fail_ms and drone not in noticed:
                noticed.add(drone)
                report.failover_latency_ms.append(t - fail_ms[drone])
        elif kind == "rescue":
            freed_total += p.get("freed", 0)
        elif kind == "msg_drop":
            report.dropped_message_count += 1
            dropped_ids.add(p["msg_id"])
        elif kind == "msg_deliver":
            if any(link.startswith("satellite:") for link in p.get("path", ())):
                sat_deliveries.append(p["msg_id"])
        elif kind == "red" and report.red_alarm_ms is None:
            report.red_alarm_ms = t

    report.satellite_fallback_count = sum(
        1 for msg_id in sat_deliveries if msg_id in dropped_ids)
    if quake_ms is not None and first_alert:
        latencies = sorted(t - quake_ms for t in first_alert.values())
        report.detection_latency_min_ms = latencies[0]
        report.detection_latency_median_ms = statistics.median(latencies)
        report.detection_latency_max_ms = latencies[-1]
    if trapped_total > 0:
        report.rescued_fraction = freed_total / trapped_total
    return report


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def report_csv(report: MetricsReport) -> str:
    rows = [CSV_HEADER,
            f"first_full_coverage_ms,{_cell(report.first_full_coverage_ms)}"]
    for latency in report.failover_latency_ms:
        rows.append(f"failover_latency_ms,{_cell(latency)}")
    rows.extend([
        f"detection_latency_min_ms,{_cell(report.detection_latency_min_ms)}",
        f"detection_latency_median_ms,{_cell(report.detection_latency_median_ms)}",
        f"detection_latency_max_ms,{_cell(report.detection_latency_max_ms)}",
        f"rescued_fraction,{_cell(report.rescued_fraction)}",
        f"satellite_fallback_count,{_cell(report.satellite_fallback_count)}",
        f"dropped_message_count,{_cell(report.dropped_message_count)}",
        f"red_alarm_ms,{_cell(report.red_alarm_ms)}",
    ])
    return "\n".join(rows) + "\n"


def report_text(report: MetricsReport) -> str:
    def show(value, unit=""):
        return "n/a" if value is None else f"{value}{unit}"

    lines = [
        f"full coverage reached:   {show(report.first_full_coverage_ms, ' ms')}",
        f"red alarm:               {show(report.red_alarm_ms, ' ms')}",
        f"failovers:               {len(report.failover_latency_ms)}"
        + (f" (latencies ms: {', '.join(str(v) for v in report.failover_latency_ms)})"
           if report.failover_latency_ms else ""),
        "detection latency ms:    "
        + (f"min {report.detection_latency_min_ms} / "
           f"median {report.detection_latency_median_ms} / "
           f"max {report.detection_latency_max_ms}"
           if report.detection_latency_min_ms is not None else "n/a"),
        f"rescued fraction:        {show(report.rescued_fraction)}",
        f"satellite fallbacks:     {report.satellite_fallback_count}",
        f"dropped messages:        {report.dropped_message_count}",
    ]
    return "\n".join(lines) + "\n"
