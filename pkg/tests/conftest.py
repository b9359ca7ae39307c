"""Shared helpers: scenario loading, in-memory runs, and textual scenario surgery."""
from __future__ import annotations

import io
import json
import re
from pathlib import Path

import pytest

from rescuenet.scenario import Scenario, load_scenario, parse_scenario_text, validate_scenario
from rescuenet.sim import run_simulation

ROOT = Path(__file__).resolve().parent.parent
S1_PATH = ROOT / "scenarios" / "s1.scenario"

MINIMAL_TEXT = """\
[world]
width = 2
height = 2
default_fault = 0.1
default_pop = 0
roads = grid4 cap=10

zone = L1 risk=L rect=0,0,1,1

station = s0 cell=0,0

[actors]
edge_server = 0 cell=1,0
drone = 0 station=s0 kind=nurse
alpha = cell=0,0
beta = cell=1,0
crisis = cell=0,1
police = cell=0,1
seismic = cell=1,1
ground_station = 0 cell=1,1
beta_zones = L1

[quake]
epicenter = 0.0,0.0
magnitude = 0.0
t_ms = 2000

[run]
seed = 7
t_end_ms = 12000
"""


@pytest.fixture
def s1() -> Scenario:
    return load_scenario(str(S1_PATH))


@pytest.fixture
def minimal() -> Scenario:
    return parse_and_validate(MINIMAL_TEXT)


def parse_and_validate(text: str) -> Scenario:
    sc = parse_scenario_text(text)
    validate_scenario(sc)
    return sc


def run_text(sc: Scenario, seed=None, t_end=None, check=True) -> str:
    buf = io.StringIO()
    run_simulation(sc, trace_out=buf, seed=seed, t_end_ms=t_end, check_invariants=check)
    return buf.getvalue()


def run_records(sc: Scenario, seed=None, t_end=None, check=True) -> list[dict]:
    return [json.loads(line) for line in run_text(sc, seed, t_end, check).splitlines()]


def s1_text() -> str:
    return S1_PATH.read_text()


def edit_scenario(text: str, drop: list[str] = (), replace: list[tuple[str, str]] = (),
                  add: dict[str, list[str]] = None) -> str:
    """Line-level scenario surgery for variants.

    drop: regexes; any line matching one is removed.
    replace: (regex, replacement) applied per line, first match wins.
    add: section name -> lines appended at the end of that section.
    """
    out = []
    lines = text.splitlines()
    for line in lines:
        if any(re.search(pat, line) for pat in drop):
            continue
        for pat, repl in replace:
            if re.search(pat, line):
                line = re.sub(pat, repl, line)
                break
        out.append(line)
    if add:
        final = []
        open_section = None
        for line in out:
            m = re.match(r"\[(\w+)\]", line.strip())
            if m:
                if open_section in add:
                    final.extend(add[open_section])
                open_section = m.group(1)
            final.append(line)
        if open_section in add:
            final.extend(add[open_section])
        out = final
    return "\n".join(out) + "\n"


def variant(drop: list[str] = (), replace: list[tuple[str, str]] = (),
            add: dict[str, list[str]] = None) -> Scenario:
    return parse_and_validate(edit_scenario(s1_text(), drop, replace, add))


def by_kind(records: list[dict], kind: str) -> list[dict]:
    return [r for r in records if r["kind"] == kind]


def sends_of(records: list[dict], msg_kind: str) -> list[dict]:
    return [r for r in records if r["kind"] == "msg_send"
            and r["payload"].get("msg_kind") == msg_kind]
