"""Static disaster world: grid cells, risk zoning, shaking intensity, survivors, roads."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional

from .engine import RngStream

# Fault-strength thresholds for risk classification (inclusive lower bounds).
RISK_HIGH_THRESHOLD = 0.7
RISK_MEDIUM_THRESHOLD = 0.3

# Intensity attenuation length in meters.
DEFAULT_LAMBDA_M = 2000.0
DEFAULT_CELL_SIZE_M = 500.0

# Logistic collapse model: midpoint intensity and scale.
COLLAPSE_MIDPOINT = 5.0
COLLAPSE_SCALE = 0.8

DEFAULT_TRAP_RATE = 0.15
DEFAULT_BLOCK_FACTOR = 0.4
DEFAULT_SAFE_INTENSITY = 2.0


class RiskLevel(IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2

    @property
    def code(self) -> str:
        return {RiskLevel.LOW: "L", RiskLevel.MEDIUM: "M", RiskLevel.HIGH: "H"}[self]

    @classmethod
    def from_code(cls, code: str) -> "RiskLevel":
        table = {"L": cls.LOW, "M": cls.MEDIUM, "H": cls.HIGH}
        if code not in table:
            raise ValueError(f"unknown risk code {code!r}")
        return table[code]


def classify_risk(fault_strength: float,
                  high: float = RISK_HIGH_THRESHOLD,
                  medium: float = RISK_MEDIUM_THRESHOLD) -> RiskLevel:
    """Map fault strength in [0, 1] to a risk level. Thresholds are inclusive."""
    if not 0.0 <= fault_strength <= 1.0:
        raise ValueError(f"fault_strength {fault_strength} outside [0, 1]")
    if fault_strength >= high:
        return RiskLevel.HIGH
    if fault_strength >= medium:
        return RiskLevel.MEDIUM
    return RiskLevel.LOW


@dataclass
class Cell:
    cell_id: int           # row-major: y * width + x
    x: int
    y: int
    fault_strength: float
    population: int
    open_space: bool = False
    predefined_secure: bool = False
    risk: RiskLevel = RiskLevel.LOW


@dataclass
class Zone:
    zone_id: str
    cell_ids: tuple[int, ...]
    risk: RiskLevel
    theta: float = 2.0        # sensor trigger threshold for sensors in this zone
    noise_sigma: float = 0.05  # sensor measurement noise for sensors in this zone


@dataclass
class Station:
    station_id: str
    cell_id: int


@dataclass
class ZoneMap:
    """The grid plus its zone partition and drone stations."""
    width: int
    height: int
    cell_size_m: float
    cells: list[Cell]
    zones: list[Zone]
    stations: list[Station]
    _zone_of_cell: dict[int, str] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._zone_of_cell:
            for zone in self.zones:
                for cid in zone.cell_ids:
                    self._zone_of_cell[cid] = zone.zone_id

    def cell_at(self, x: int, y: int) -> Cell:
        return self.cells[y * self.width + x]

    def cell(self, cell_id: int) -> Cell:
        return self.cells[cell_id]

    def zone(self, zone_id: str) -> Zone:
        for z in self.zones:
            if z.zone_id == zone_id:
                return z
        raise KeyError(zone_id)

    def zone_of_cell(self, cell_id: int) -> Optional[str]:
        return self._zone_of_cell.get(cell_id)

    def station(self, station_id: str) -> Station:
        for s in self.stations:
            if s.station_id == station_id:
                return s
        raise KeyError(station_id)

    def zone_centroid(self, zone_id: str) -> tuple[float, float]:
        zone = self.zone(zone_id)
        xs = [self.cells[cid].x for cid in zone.cell_ids]
        ys = [self.cells[cid].y for cid in zone.cell_ids]
        return (sum(xs) / len(xs), sum(ys) / len(ys))

    def zone_centroid_cell(self, zone_id: str) -> int:
        """Member cell nearest the centroid; ties resolve to the lowest cell id."""
        cx, cy = self.zone_centroid(zone_id)
        zone = self.zone(zone_id)
        return min(zone.cell_ids,
                   key=lambda cid: ((self.cells[cid].x - cx) ** 2 + (self.cells[cid].y - cy) ** 2, cid))

    def distance_m(self, a: tuple[float, float], b: tuple[float, float]) -> float:
        return math.hypot(a[0] - b[0], a[1] - b[1]) * self.cell_size_m


@dataclass(frozen=True)
class EarthquakeEvent:
    epicenter: tuple[float, float]  # cell coordinates, may be fractional
    magnitude: float
    t_ms: int


def intensity_at(quake: EarthquakeEvent, cell: Cell,
                 lambda_m: float = DEFAULT_LAMBDA_M,
                 cell_size_m: float = DEFAULT_CELL_SIZE_M) -> float:
    """Shaking intensity at a cell: magnitude * exp(-d / lambda), d in meters."""
    if lambda_m <= 0:
        raise ValueError(f"attenuation length must be positive, got {lambda_m}")
    d = math.hypot(cell.x - quake.epicenter[0], cell.y - quake.epicenter[1]) * cell_size_m
    return quake.magnitude * math.exp(-d / lambda_m)


def compute_field(zm: ZoneMap, quake: EarthquakeEvent,
                  lambda_m: float = DEFAULT_LAMBDA_M) -> dict[int, float]:
    """Intensity for every cell; static once the quake parameters are known."""
    return {c.cell_id: intensity_at(quake, c, lambda_m, zm.cell_size_m) for c in zm.cells}


def collapse_probability(intensity: float,
                         midpoint: float = COLLAPSE_MIDPOINT,
                         scale: float = COLLAPSE_SCALE) -> float:
    """Logistic probability that structures in a cell collapse at this intensity."""
    return 1.0 / (1.0 + math.exp(-(intensity - midpoint) / scale))


@dataclass
class SurvivorSite:
    cell_id: int
    total: int
    detected: int = 0
    rescued: int = 0
    first_detected_ms: Optional[int] = None


def seed_survivors(zm: ZoneMap, intensity: dict[int, float], trap_rate: float,
                   rng: RngStream,
                   midpoint: float = COLLAPSE_MIDPOINT,
                   scale: float = COLLAPSE_SCALE) -> list[SurvivorSite]:
    """Draw trapped-survivor counts per cell.

    Each cell's count is Binomial(population, collapse_probability * trap_rate);
    cells that draw zero produce no site. Iterates cells in id order so the
    stream consumption is reproducible.
    """
    sites = []
    for cell in zm.cells:
        if cell.population <= 0:
            continue
        p = collapse_probability(intensity[cell.cell_id], midpoint, scale) * trap_rate
        if p <= 0.0:
            continue
        total = rng.binomial(cell.population, p)
        if total > 0:
            sites.append(SurvivorSite(cell_id=cell.cell_id, total=total))
    return sites


@dataclass
class RoadEdge:
    edge_id: str
    u: int            # cell id
    v: int            # cell id
    length_m: float
    capacity: int     # agents per tick before the edge counts as congested
    blocked: bool = False


@dataclass
class RoadGraph:
    nodes: list[int]
    edges: list[RoadEdge]
    _adj: dict[int, list[tuple[RoadEdge, int]]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._rebuild_adjacency()

    def _rebuild_adjacency(self):
        self._adj = {n: [] for n in self.nodes}
        for e in self.edges:
            self._adj[e.u].append((e, e.v))
            self._adj[e.v].append((e, e.u))
        for n in self._adj:
            self._adj[n].sort(key=lambda pair: pair[0].edge_id)

    def neighbors(self, node: int) -> list[tuple[RoadEdge, int]]:
        """Incident (edge, other-endpoint) pairs in edge-id order."""
        return self._adj.get(node, [])

    def edge(self, edge_id: str) -> RoadEdge:
        for e in self.edges:
            if e.edge_id == edge_id:
                return e
        raise KeyError(edge_id)


def grid_roads(zm: ZoneMap, capacity: int) -> RoadGraph:
    """4-connected road lattice over the grid; edge length equals cell size."""
    edges = []
    for cell in zm.cells:
        if cell.x + 1 < zm.width:
            right = zm.cell_at(cell.x + 1, cell.y)
            edges.append(RoadEdge(f"e{cell.cell_id:03d}h", cell.cell_id, right.cell_id,
                                  zm.cell_size_m, capacity))
        if cell.y + 1 < zm.height:
            down = zm.cell_at(cell.x, cell.y + 1)
            edges.append(RoadEdge(f"e{cell.cell_id:03d}v", cell.cell_id, down.cell_id,
                                  zm.cell_size_m, capacity))
    return RoadGraph([c.cell_id for c in zm.cells], edges)


def block_roads(graph: RoadGraph, intensity: dict[int, float], block_factor: float,
                rng: RngStream,
                midpoint: float = COLLAPSE_MIDPOINT,
                scale: float = COLLAPSE_SCALE) -> list[RoadEdge]:
    """Sample quake damage to roads; returns the edges newly blocked.

    Every edge consumes one draw regardless of prior state (stream stability);
    already-blocked edges stay blocked.
    """
    newly = []
    for e in graph.edges:
        worst = max(intensity.get(e.u, 0.0), intensity.get(e.v, 0.0))
        hit = rng.bernoulli(collapse_probability(worst, midpoint, scale) * block_factor)
        if hit and not e.blocked:
            newly.append(e)
        e.blocked = e.blocked or hit
    return newly
