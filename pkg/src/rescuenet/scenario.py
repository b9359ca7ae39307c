"""Scenario documents: a line-oriented key/value format with sections.

The canonical form materializes every default and every cell, so a trace
header that embeds it fully describes the run; parse(canonical) re-emits the
identical text. The grammar lives in docs/scenario-format.md.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

SECTIONS = ("world", "actors", "quake", "faults", "run")


class ScenarioError(Exception):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


# -- section dataclasses ----------------------------------------------------

@dataclass
class WorldParams:
    cell_size_m: float = 500.0
    risk_high: float = 0.7
    risk_medium: float = 0.3
    lambda_m: float = 2000.0
    collapse_midpoint: float = 5.0
    collapse_scale: float = 0.8
    trap_rate: float = 0.15
    block_factor: float = 0.4
    safe_intensity: float = 2.0


@dataclass
class ActorParams:
    h_ms: int = 5000
    miss_limit: int = 3
    edge_k: int = 3
    edge_window_ms: int = 2000
    theta: float = 2.0
    noise_h: float = 0.2
    noise_m: float = 0.2
    noise_l: float = 0.05
    drone_speed_mps: float = 20.0
    sense_threshold: float = 3.0
    scan_period_ms: int = 2000
    scan_radius_cells: float = 2.0
    detect_q: float = 0.3
    rescue_rate: int = 2
    move_tick_ms: int = 1000
    flow_tick_ms: int = 1000
    sample_period_ms: int = 500
    sample_count: int = 5
    red_threshold: float = 4.0
    beta_d: float = 0.8
    m_down_multiplier: float = 0.5
    lat_p2p_ms: int = 20
    lat_wireless_ms: int = 40
    lat_satellite_ms: int = 600


@dataclass
class CellSpec:
    x: int
    y: int
    fault: float
    pop: int
    open_space: bool = False
    secure: bool = False


@dataclass
class ZoneSpec:
    zone_id: str
    risk: str                      # "H" | "M" | "L"
    cells: list[tuple[int, int]]   # (x, y) pairs
    theta: Optional[float] = None
    noise: Optional[float] = None


@dataclass
class StationSpec:
    station_id: str
    x: int
    y: int


@dataclass
class SensorSpec:
    index: int
    x: int
    y: int
    edge: int                      # edge server this sensor reports to
    pair: Optional[int] = None     # paired drone index, High-risk zones only


@dataclass
class DroneSpec:
    index: int
    station: str
    zone: Optional[str] = None
    kind: str = "coverage"         # coverage | spare | nurse | gateway
    label: Optional[str] = None    # gateway label A-D


@dataclass
class PlacedSpec:
    index: int
    x: int
    y: int


@dataclass
class AftershockSpec:
    t_ms: int
    x: float
    y: float
    magnitude: float


@dataclass
class QuakeSpec:
    x: float = 0.0
    y: float = 0.0
    magnitude: float = 0.0
    t_ms: int = 0
    early_warning_lead_ms: int = 0
    aftershocks: list[AftershockSpec] = field(default_factory=list)


@dataclass
class KillSpec:
    drone: int
    t_ms: int


@dataclass
class FaultSpec:
    kills: list[KillSpec] = field(default_factory=list)
    hazard_rate: float = 0.0
    force_down: str = "none"       # none | wireless_all


@dataclass
class RunSpec:
    seed: int = 0
    t_end_ms: int = 60000


@dataclass
class Scenario:
    width: int = 0
    height: int = 0
    default_fault: float = 0.0
    default_pop: int = 0
    wp: WorldParams = field(default_factory=WorldParams)
    ap: ActorParams = field(default_factory=ActorParams)
    cells: dict[tuple[int, int], CellSpec] = field(default_factory=dict)
    zones: list[ZoneSpec] = field(default_factory=list)
    stations: list[StationSpec] = field(default_factory=list)
    road_capacity: int = 25
    sensors: list[SensorSpec] = field(default_factory=list)
    edge_servers: list[PlacedSpec] = field(default_factory=list)
    drones: list[DroneSpec] = field(default_factory=list)
    ground_stations: list[PlacedSpec] = field(default_factory=list)
    teams: list[PlacedSpec] = field(default_factory=list)
    alpha_cell: tuple[int, int] = (0, 0)
    beta_cell: tuple[int, int] = (0, 0)
    crisis_cell: tuple[int, int] = (0, 0)
    police_cell: tuple[int, int] = (0, 0)
    seismic_cell: tuple[int, int] = (0, 0)
    beta_zones: list[str] = field(default_factory=list)
    quake: QuakeSpec = field(default_factory=QuakeSpec)
    faults: FaultSpec = field(default_factory=FaultSpec)
    run: RunSpec = field(default_factory=RunSpec)

    # -- resolved views -----------------------------------------------------

    def cell_spec(self, x: int, y: int) -> CellSpec:
        spec = self.cells.get((x, y))
        if spec is None:
            spec = CellSpec(x, y, self.default_fault, self.default_pop)
        return spec

    def all_cells(self) -> list[CellSpec]:
        return [self.cell_spec(x, y) for y in range(self.height) for x in range(self.width)]

    def drone_key(self, index: int) -> str:
        return f"Drone:{index}"

    def canonical_text(self) -> str:
        """Fully resolved document: every default explicit, every cell listed,
        rows in id order. parse(canonical_text) emits the same text again."""
        out: list[str] = []
        out.append("[world]")
        out.append(f"width = {self.width}")
        out.append(f"height = {self.height}")
        for name in ("cell_size_m", "risk_high", "risk_medium", "lambda_m",
                     "collapse_midpoint", "collapse_scale", "trap_rate",
                     "block_factor", "safe_intensity"):
            out.append(f"{name} = {_fmt(getattr(self.wp, name))}")
        out.append(f"road_capacity = {self.road_capacity}")
        for spec in self.all_cells():
            out.append(f"cell = {spec.x},{spec.y} fault={_fmt(spec.fault)} pop={spec.pop}"
                       f" open={int(spec.open_space)} secure={int(spec.secure)}")
        for zone in sorted(self.zones, key=lambda z: z.zone_id):
            cells = ";".join(f"{x},{y}" for x, y in zone.cells)
            row = f"zone = {zone.zone_id} risk={zone.risk} cells={cells}"
            if zone.theta is not None:
                row += f" theta={_fmt(zone.theta)}"
            if zone.noise is not None:
                row += f" noise={_fmt(zone.noise)}"
            out.append(row)
        for st in sorted(self.stations, key=lambda s: s.station_id):
            out.append(f"station = {st.station_id} cell={st.x},{st.y}")
        out.append("")
        out.append("[actors]")
        for name in ("h_ms", "miss_limit", "edge_k", "edge_window_ms", "theta",
                     "noise_h", "noise_m", "noise_l", "drone_speed_mps",
                     "sense_threshold", "scan_period_ms", "scan_radius_cells",
                     "detect_q", "rescue_rate", "move_tick_ms", "flow_tick_ms",
                     "sample_period_ms", "sample_count", "red_threshold",
                     "beta_d", "m_down_multiplier", "lat_p2p_ms",
                     "lat_wireless_ms", "lat_satellite_ms"):
            out.append(f"{name} = {_fmt(getattr(self.ap, name))}")
        for s in sorted(self.sensors, key=lambda s: s.index):
            row = f"sensor = {s.index} cell={s.x},{s.y} edge={s.edge}"
            if s.pair is not None:
                row += f" pair={s.pair}"
            out.append(row)
        for e in sorted(self.edge_servers, key=lambda e: e.index):
            out.append(f"edge_server = {e.index} cell={e.x},{e.y}")
        for d in sorted(self.drones, key=lambda d: d.index):
            row = f"drone = {d.index} station={d.station} kind={d.kind}"
            if d.zone is not None:
                row += f" zone={d.zone}"
            if d.label is not None:
                row += f" label={d.label}"
            out.append(row)
        for g in sorted(self.ground_stations, key=lambda g: g.index):
            out.append(f"ground_station = {g.index} cell={g.x},{g.y}")
        for t in sorted(self.teams, key=lambda t: t.index):
            out.append(f"rescue_team = {t.index} cell={t.x},{t.y}")
        out.append(f"alpha = cell={self.alpha_cell[0]},{self.alpha_cell[1]}")
        out.append(f"beta = cell={self.beta_cell[0]},{self.beta_cell[1]}")
        out.append(f"crisis = cell={self.crisis_cell[0]},{self.crisis_cell[1]}")
        out.append(f"police = cell={self.police_cell[0]},{self.police_cell[1]}")
        out.append(f"seismic = cell={self.seismic_cell[0]},{self.seismic_cell[1]}")
        if self.beta_zones:
            out.append("beta_zones = " + " ".join(self.beta_zones))
        out.append("")
        out.append("[quake]")
        out.append(f"epicenter = {_fmt(self.quake.x)},{_fmt(self.quake.y)}")
        out.append(f"magnitude = {_fmt(self.quake.magnitude)}")
        out.append(f"t_ms = {self.quake.t_ms}")
        out.append(f"early_warning_lead_ms = {self.quake.early_warning_lead_ms}")
        for a in sorted(self.quake.aftershocks, key=lambda a: a.t_ms):
            out.append(f"aftershock = t={a.t_ms} epicenter={_fmt(a.x)},{_fmt(a.y)}"
                       f" magnitude={_fmt(a.magnitude)}")
        out.append("")
        out.append("[faults]")
        out.append(f"hazard_rate = {_fmt(self.faults.hazard_rate)}")
        out.append(f"force_down = {self.faults.force_down}")
        for k in sorted(self.faults.kills, key=lambda k: (k.t_ms, k.drone)):
            out.append(f"kill = drone={k.drone} t={k.t_ms}")
        out.append("")
        out.append("[run]")
        out.append(f"seed = {self.run.seed}")
        out.append(f"t_end_ms = {self.run.t_end_ms}")
        return "\n".join(out) + "\n"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


# -- parsing ------------------------------------------------------------------

def parse_scenario_text(text: str) -> Scenario:
    sc = Scenario()
    section = None
    secure_extra: list[tuple[int, int]] = []
    open_extra: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ScenarioError("malformed section header", lineno)
            section = line[1:-1].strip()
            if section not in SECTIONS:
                raise ScenarioError(f"unknown section [{section}]", lineno)
            continue
        if section is None:
            raise ScenarioError("entry before any [section]", lineno)
        if "=" not in line:
            raise ScenarioError("expected key = value", lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        try:
            _apply_entry(sc, section, key, value, secure_extra, open_extra)
        except ScenarioError:
            raise
        except (ValueError, KeyError) as exc:
            raise ScenarioError(f"bad value for {key!r}: {exc}", lineno) from exc
    for x, y in secure_extra:
        spec = sc.cells.setdefault((x, y), CellSpec(x, y, sc.default_fault, sc.default_pop))
        spec.secure = True
    for x, y in open_extra:
        spec = sc.cells.setdefault((x, y), CellSpec(x, y, sc.default_fault, sc.default_pop))
        spec.open_space = True
    validate_scenario(sc)
    return sc


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file: {exc}")
    return parse_scenario_text(text)


def _apply_entry(sc: Scenario, section: str, key: str, value: str,
                 secure_extra: list, open_extra: list) -> None:
    if section == "world":
        _apply_world(sc, key, value, secure_extra, open_extra)
    elif section == "actors":
        _apply_actors(sc, key, value)
    elif section == "quake":
        _apply_quake(sc, key, value)
    elif section == "faults":
        _apply_faults(sc, key, value)
    elif section == "run":
        _apply_run(sc, key, value)


def _apply_world(sc, key, value, secure_extra, open_extra):
    wp_float = {"cell_size_m", "risk_high", "risk_medium", "lambda_m",
                "collapse_midpoint", "collapse_scale", "trap_rate",
                "block_factor", "safe_intensity"}
    if key == "width":
        sc.width = int(value)
    elif key == "height":
        sc.height = int(value)
    elif key == "default_fault":
        sc.default_fault = float(value)
    elif key == "default_pop":
        sc.default_pop = int(value)
    elif key == "road_capacity":
        sc.road_capacity = int(value)
    elif key in wp_float:
        setattr(sc.wp, key, float(value))
    elif key == "cell":
        head, opts = _row(value)
        x, y = _pair_int(head)
        spec = CellSpec(x, y,
                        float(opts.get("fault", sc.default_fault)),
                        int(opts.get("pop", sc.default_pop)),
                        open_space=_flag(opts.get("open", "0")),
                        secure=_flag(opts.get("secure", "0")))
        sc.cells[(x, y)] = spec
    elif key == "zone":
        head, opts = _row(value)
        risk = opts.get("risk")
        if risk not in ("H", "M", "L"):
            raise ValueError(f"zone {head}: risk must be H, M or L")
        if "cells" in opts:
            cells = [_pair_int(tok) for tok in opts["cells"].split(";") if tok]
        elif "rect" in opts:
            x0, y0, x1, y1 = (int(v) for v in opts["rect"].split(","))
            cells = [(x, y) for y in range(y0, y1 + 1) for x in range(x0, x1 + 1)]
        else:
            raise ValueError(f"zone {head}: needs cells= or rect=")
        sc.zones.append(ZoneSpec(head, risk, cells,
                                 theta=float(opts["theta"]) if "theta" in opts else None,
                                 noise=float(opts["noise"]) if "noise" in opts else None))
    elif key == "station":
        head, opts = _row(value)
        x, y = _pair_int(opts["cell"])
        sc.stations.append(StationSpec(head, x, y))
    elif key == "secure":
        secure_extra.append(_pair_int(value))
    elif key == "open":
        open_extra.append(_pair_int(value))
    elif key == "roads":
        head, opts = _row(value)
        if head != "grid4":
            raise ValueError(f"unknown road layout {head!r}")
        if "cap" in opts:
            sc.road_capacity = int(opts["cap"])
    else:
        raise ScenarioError(f"unknown world key {key!r}")


def _apply_actors(sc, key, value):
    ap_int = {"h_ms", "miss_limit", "edge_k", "edge_window_ms", "scan_period_ms",
              "rescue_rate", "move_tick_ms", "flow_tick_ms", "sample_period_ms",
              "sample_count", "lat_p2p_ms", "lat_wireless_ms", "lat_satellite_ms"}
    ap_float = {"theta", "noise_h", "noise_m", "noise_l", "drone_speed_mps",
                "sense_threshold", "scan_radius_cells", "detect_q", "red_threshold",
                "beta_d", "m_down_multiplier"}
    if key in ap_int:
        setattr(sc.ap, key, int(value))
    elif key in ap_float:
        setattr(sc.ap, key, float(value))
    elif key == "sensor":
        head, opts = _row(value)
        x, y = _pair_int(opts["cell"])
        pair = int(opts["pair"]) if "pair" in opts else None
        sc.sensors.append(SensorSpec(int(head), x, y, int(opts["edge"]), pair))
    elif key == "edge_server":
        head, opts = _row(value)
        x, y = _pair_int(opts["cell"])
        sc.edge_servers.append(PlacedSpec(int(head), x, y))
    elif key == "drone":
        head, opts = _row(value)
        kind = opts.get("kind", "coverage")
        if kind not in ("coverage", "spare", "nurse", "gateway"):
            raise ValueError(f"drone {head}: unknown kind {kind!r}")
        sc.drones.append(DroneSpec(int(head), opts["station"], opts.get("zone"),
                                   kind, opts.get("label")))
    elif key == "ground_station":
        head, opts = _row(value)
        x, y = _pair_int(opts["cell"])
        sc.ground_stations.append(PlacedSpec(int(head), x, y))
    elif key == "rescue_team":
        head, opts = _row(value)
        x, y = _pair_int(opts["cell"])
        sc.teams.append(PlacedSpec(int(head), x, y))
    elif key in ("alpha", "beta", "crisis", "police", "seismic"):
        opts = dict(tok.split("=", 1) for tok in value.split())
        setattr(sc, f"{key}_cell", _pair_int(opts["cell"]))
    elif key == "beta_zones":
        sc.beta_zones = value.split()
    else:
        raise ScenarioError(f"unknown actors key {key!r}")


def _apply_quake(sc, key, value):
    if key == "epicenter":
        sc.quake.x, sc.quake.y = _pair_float(value)
    elif key == "magnitude":
        sc.quake.magnitude = float(value)
    elif key == "t_ms":
        sc.quake.t_ms = int(value)
    elif key == "early_warning_lead_ms":
        sc.quake.early_warning_lead_ms = int(value)
    elif key == "aftershock":
        opts = dict(tok.split("=", 1) for tok in value.split())
        x, y = _pair_float(opts["epicenter"])
        sc.quake.aftershocks.append(
            AftershockSpec(int(opts["t"]), x, y, float(opts["magnitude"])))
    else:
        raise ScenarioError(f"unknown quake key {key!r}")


def _apply_faults(sc, key, value):
    if key == "hazard_rate":
        sc.faults.hazard_rate = float(value)
    elif key == "force_down":
        if value not in ("none", "wireless_all"):
            raise ValueError(f"force_down must be none or wireless_all, got {value!r}")
        sc.faults.force_down = value
    elif key == "kill":
        opts = dict(tok.split("=", 1) for tok in value.split())
        sc.faults.kills.append(KillSpec(int(opts["drone"]), int(opts["t"])))
    else:
        raise ScenarioError(f"unknown faults key {key!r}")


def _apply_run(sc, key, value):
    if key == "seed":
        sc.run.seed = int(value)
    elif key == "t_end_ms":
        sc.run.t_end_ms = int(value)
    else:
        raise ScenarioError(f"unknown run key {key!r}")


def _row(value: str) -> tuple[str, dict[str, str]]:
    """Split 'head k1=v1 k2=v2' into the head token and an option dict."""
    tokens = value.split()
    if not tokens:
        raise ValueError("empty row")
    head = tokens[0]
    opts: dict[str, str] = {}
    for tok in tokens[1:]:
        if "=" not in tok:
            raise ValueError(f"expected key=value token, got {tok!r}")
        k, _, v = tok.partition("=")
        opts[k] = v
    return head, opts


def _pair_int(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected x,y pair, got {text!r}")
    return int(parts[0]), int(parts[1])


def _pair_float(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected x,y pair, got {text!r}")
    return float(parts[0]), float(parts[1])


def _flag(text: str) -> bool:
    return text not in ("0", "false", "no")


# -- validation ---------------------------------------------------------------

def validate_scenario(sc: Scenario) -> None:
    """Semantic checks. Raises ScenarioError naming the offending field."""
    if sc.width <= 0 or sc.height <= 0:
        raise ScenarioError("world: width and height must be positive")
    if not 0.0 <= sc.wp.risk_medium <= sc.wp.risk_high <= 1.0:
        raise ScenarioError("world: need 0 <= risk_medium <= risk_high <= 1")
    if sc.wp.lambda_m <= 0:
        raise ScenarioError("world: lambda_m must be positive")
    for name in ("trap_rate", "block_factor"):
        v = getattr(sc.wp, name)
        if not 0.0 <= v <= 1.0:
            raise ScenarioError(f"world: {name} must lie in [0, 1]")
    for x, y in sc.cells:
        if not (0 <= x < sc.width and 0 <= y < sc.height):
            raise ScenarioError(f"world: cell {x},{y} outside the {sc.width}x{sc.height} grid")
        f = sc.cells[(x, y)].fault
        if not 0.0 <= f <= 1.0:
            raise ScenarioError(f"world: cell {x},{y} fault strength {f} outside [0, 1]")
    if not 0.0 <= sc.default_fault <= 1.0:
        raise ScenarioError("world: default_fault outside [0, 1]")

    # Zones must partition the grid exactly.
    seen: dict[tuple[int, int], str] = {}
    ids = set()
    for zone in sc.zones:
        if zone.zone_id in ids:
            raise ScenarioError(f"world: duplicate zone id {zone.zone_id}")
        ids.add(zone.zone_id)
        for xy in zone.cells:
            if not (0 <= xy[0] < sc.width and 0 <= xy[1] < sc.height):
                raise ScenarioError(f"zone {zone.zone_id}: cell {xy[0]},{xy[1]} outside grid")
            if xy in seen:
                raise ScenarioError(
                    f"zones {seen[xy]} and {zone.zone_id} both claim cell {xy[0]},{xy[1]}")
            seen[xy] = zone.zone_id
    if sc.zones:
        missing = [(x, y) for y in range(sc.height) for x in range(sc.width)
                   if (x, y) not in seen]
        if missing:
            raise ScenarioError(
                f"zone partition leaves cell {missing[0][0]},{missing[0][1]} unassigned")

    # High-fault cells demand a High zone somewhere.
    has_high_cell = any(spec.fault >= sc.wp.risk_high for spec in sc.all_cells())
    if has_high_cell and not any(z.risk == "H" for z in sc.zones):
        raise ScenarioError("world: high-fault cells present but no High-risk zone declared")

    station_ids = set()
    for st in sc.stations:
        if st.station_id in station_ids:
            raise ScenarioError(f"world: duplicate station id {st.station_id}")
        station_ids.add(st.station_id)
        if not (0 <= st.x < sc.width and 0 <= st.y < sc.height):
            raise ScenarioError(f"station {st.station_id}: cell {st.x},{st.y} outside grid")

    _validate_actors(sc, station_ids)
    _validate_quake_faults_run(sc)


def _validate_actors(sc: Scenario, station_ids: set[str]) -> None:
    ap = sc.ap
    if ap.h_ms <= 0 or ap.miss_limit < 1:
        raise ScenarioError("actors: h_ms must be positive and miss_limit >= 1")
    if ap.edge_k < 1 or ap.edge_window_ms <= 0:
        raise ScenarioError("actors: edge_k >= 1 and edge_window_ms > 0 required")
    if not 0.0 < ap.detect_q <= 1.0:
        raise ScenarioError("actors: detect_q must lie in (0, 1]")
    if ap.drone_speed_mps <= 0:
        raise ScenarioError("actors: drone_speed_mps must be positive")
    for name in ("lat_p2p_ms", "lat_wireless_ms", "lat_satellite_ms"):
        if getattr(ap, name) <= 0:
            raise ScenarioError(f"actors: {name} must be positive")

    zone_ids = {z.zone_id for z in sc.zones}
    zone_risk = {z.zone_id: z.risk for z in sc.zones}
    cell_zone = {}
    for z in sc.zones:
        for xy in z.cells:
            cell_zone[xy] = z.zone_id

    drone_ids = set()
    nurse_count = 0
    gateway_labels = set()
    assigned_zones: list[str] = []
    for d in sc.drones:
        if d.index in drone_ids:
            raise ScenarioError(f"actors: duplicate drone index {d.index}")
        drone_ids.add(d.index)
        if d.station not in station_ids:
            raise ScenarioError(f"drone {d.index}: unknown station {d.station!r}")
        if d.kind == "nurse":
            nurse_count += 1
            if d.zone is not None:
                raise ScenarioError(f"drone {d.index}: the nurse carries no zone")
        elif d.kind == "gateway":
            if d.label not in ("A", "B", "C", "D"):
                raise ScenarioError(f"drone {d.index}: gateway label must be A-D")
            if d.label in gateway_labels:
                raise ScenarioError(f"actors: duplicate gateway label {d.label}")
            gateway_labels.add(d.label)
        elif d.kind == "coverage":
            if d.zone is None:
                raise ScenarioError(f"drone {d.index}: coverage drones need zone=")
            if d.zone not in zone_ids:
                raise ScenarioError(f"drone {d.index}: unknown zone {d.zone!r}")
            assigned_zones.append(d.zone)
        elif d.kind == "spare" and d.zone is not None:
            raise ScenarioError(f"drone {d.index}: spares carry no zone")
    if nurse_count != 1:
        raise ScenarioError(f"actors: exactly one nurse drone required, found {nurse_count}")

    for zone in sc.beta_zones:
        if zone not in zone_ids:
            raise ScenarioError(f"actors: beta_zones names unknown zone {zone!r}")
    coverage_plan = assigned_zones + sc.beta_zones
    dupes = {z for z in coverage_plan if coverage_plan.count(z) > 1}
    if dupes:
        raise ScenarioError(f"actors: zone {sorted(dupes)[0]} has more than one assigned coverer")
    uncovered = zone_ids - set(coverage_plan)
    if uncovered:
        raise ScenarioError(f"actors: zone {sorted(uncovered)[0]} has no assigned coverer")

    sensor_ids = set()
    edge_ids = {e.index for e in sc.edge_servers}
    for s in sc.sensors:
        if s.index in sensor_ids:
            raise ScenarioError(f"actors: duplicate sensor index {s.index}")
        sensor_ids.add(s.index)
        if not (0 <= s.x < sc.width and 0 <= s.y < sc.height):
            raise ScenarioError(f"sensor {s.index}: cell {s.x},{s.y} outside grid")
        if s.edge not in edge_ids:
            raise ScenarioError(f"sensor {s.index}: unknown edge_server {s.edge}")
        zone = cell_zone.get((s.x, s.y))
        if zone is None:
            raise ScenarioError(f"sensor {s.index}: cell {s.x},{s.y} belongs to no zone")
        if zone_risk[zone] == "H":
            if s.pair is None:
                raise ScenarioError(f"sensor {s.index}: High-risk zone sensors need pair=")
            if s.pair not in drone_ids:
                raise ScenarioError(f"sensor {s.index}: paired drone {s.pair} does not exist")
        elif s.pair is not None:
            raise ScenarioError(f"sensor {s.index}: only High-risk zone sensors pair with drones")

    if not sc.edge_servers:
        raise ScenarioError("actors: at least one edge_server required")
    for coll, label in ((sc.edge_servers, "edge_server"), (sc.ground_stations, "ground_station"),
                        (sc.teams, "rescue_team")):
        idx = set()
        for p in coll:
            if p.index in idx:
                raise ScenarioError(f"actors: duplicate {label} index {p.index}")
            idx.add(p.index)
            if not (0 <= p.x < sc.width and 0 <= p.y < sc.height):
                raise ScenarioError(f"{label} {p.index}: cell {p.x},{p.y} outside grid")
    for name in ("alpha_cell", "beta_cell", "crisis_cell", "police_cell", "seismic_cell"):
        x, y = getattr(sc, name)
        if not (0 <= x < sc.width and 0 <= y < sc.height):
            raise ScenarioError(f"actors: {name.replace('_cell', '')} cell {x},{y} outside grid")


def _validate_quake_faults_run(sc: Scenario) -> None:
    q = sc.quake
    if q.magnitude < 0:
        raise ScenarioError("quake: magnitude must be non-negative")
    if q.t_ms < 0:
        raise ScenarioError("quake: t_ms must be non-negative")
    if q.early_warning_lead_ms < 0 or q.early_warning_lead_ms > q.t_ms:
        raise ScenarioError("quake: early_warning_lead_ms must lie in [0, t_ms]")
    for a in q.aftershocks:
        if a.t_ms <= q.t_ms:
            raise ScenarioError("quake: aftershocks must come after the main shock")
    drone_ids = {d.index for d in sc.drones}
    for k in sc.faults.kills:
        if k.drone not in drone_ids:
            raise ScenarioError(f"faults: kill names unknown drone {k.drone}")
        if k.t_ms < 0:
            raise ScenarioError("faults: kill time must be non-negative")
    if not 0.0 <= sc.faults.hazard_rate < 1.0:
        raise ScenarioError("faults: hazard_rate must lie in [0, 1)")
    if sc.run.t_end_ms < 0:
        raise ScenarioError("run: t_end_ms must be non-negative")
    if not 0 <= sc.run.seed < 2 ** 64:
        raise ScenarioError("run: seed must fit in 64 bits")
