"""Post-quake ground procedures: survivor scans, congestion, secure areas,
safe-route computation, rescue priority, and evacuating population flow."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .engine import RngStream
from .world import (COLLAPSE_MIDPOINT, COLLAPSE_SCALE, RoadGraph, SurvivorSite,
                    ZoneMap, collapse_probability)

DEFAULT_SCAN_RADIUS_CELLS = 2.0
DEFAULT_DETECT_PROB = 0.3      # per survivor, per scan
DEFAULT_FLOW_TICK_MS = 1000


def sites_in_radius(sites: Iterable[SurvivorSite], zm: ZoneMap, center_cell: int,
                    radius_cells: float = DEFAULT_SCAN_RADIUS_CELLS) -> list[SurvivorSite]:
    """Survivor sites within Euclidean radius of a cell, in cell-id order."""
    cx, cy = zm.cell(center_cell).x, zm.cell(center_cell).y
    found = []
    for site in sites:
        c = zm.cell(site.cell_id)
        if math.hypot(c.x - cx, c.y - cy) <= radius_cells:
            found.append(site)
    return sorted(found, key=lambda s: s.cell_id)


def scan_site(site: SurvivorSite, q: float, rng: RngStream, now_ms: int) -> int:
    """One detection pass over a site: each undetected survivor turns up with
    probability q. Updates the site counters; returns the newly detected count."""
    undetected = site.total - site.detected
    newly = sum(1 for _ in range(undetected) if rng.bernoulli(q))
    if newly > 0:
        site.detected += newly
        if site.first_detected_ms is None:
            site.first_detected_ms = now_ms
    return newly


def congested_edges(graph: RoadGraph, loads: dict[str, int]) -> list[str]:
    """Edges whose last-tick load strictly exceeds capacity, sorted by id."""
    out = []
    for e in graph.edges:
        if loads.get(e.edge_id, 0) > e.capacity:
            out.append(e.edge_id)
    return sorted(out)


def designate_secure_areas(zm: ZoneMap, intensity: dict[int, float],
                           congested_cells: set[int],
                           safe_intensity: float) -> set[int]:
    """Cells safe to shelter in: everything predefined, plus open spaces that
    are shaking below the safety threshold and are not congested."""
    secure = set()
    for cell in zm.cells:
        if cell.predefined_secure:
            secure.add(cell.cell_id)
        elif cell.open_space and intensity.get(cell.cell_id, 0.0) < safe_intensity \
                and cell.cell_id not in congested_cells:
            secure.add(cell.cell_id)
    return secure


@dataclass(frozen=True)
class SafeRoute:
    origin: int
    destination: int
    path: tuple[str, ...]   # edge ids in traversal order
    length_m: float


def compute_safe_route(graph: RoadGraph, src: int, targets: set[int],
                       congested: Optional[set[str]] = None) -> Optional[SafeRoute]:
    """Shortest usable route from src to the nearest target cell.

    Blocked and congested edges are excluded. Ties on total length break on the
    lexicographically smallest edge-id sequence (single-label Dijkstra is sound
    for that tie-break because edge lengths are strictly positive). Returns
    None when no target is reachable.
    """
    if not targets:
        return None
    if src in targets:
        return SafeRoute(src, src, (), 0.0)
    congested = congested or set()
    heap: list[tuple[float, tuple[str, ...], int]] = [(0.0, (), src)]
    settled: set[int] = set()
    while heap:
        dist, path, node = heapq.heappop(heap)
        if node in settled:
            continue
        settled.add(node)
        if node in targets:
            return SafeRoute(src, node, path, dist)
        for edge, other in graph.neighbors(node):
            if edge.blocked or edge.edge_id in congested or other in settled:
                continue
            heapq.heappush(heap, (dist + edge.length_m, path + (edge.edge_id,), other))
    return None


def priority_score(site: SurvivorSite, intensity: float,
                   midpoint: float = COLLAPSE_MIDPOINT,
                   scale: float = COLLAPSE_SCALE) -> float:
    """Urgency of a site: detected-but-unrescued count weighted by collapse risk."""
    return (site.detected - site.rescued) * collapse_probability(intensity, midpoint, scale)


def rank_sites(entries: list[tuple[SurvivorSite, float]]) -> list[SurvivorSite]:
    """Order sites for dispatch: score descending, then earliest first detection,
    then lowest cell id. Sites nobody has detected yet are not eligible."""

    def sort_key(pair):
        site, intensity = pair
        first = site.first_detected_ms if site.first_detected_ms is not None else 0
        return (-priority_score(site, intensity), first, site.cell_id)

    eligible = [p for p in entries if p[0].detected > 0]
    return [site for site, _ in sorted(eligible, key=sort_key)]


@dataclass
class FlowGroup:
    cell: int
    count: int
    route: list[str] = field(default_factory=list)  # remaining advisory edges
    route_stamp: int = -1                           # issue time of adopted advisory


@dataclass
class Advisory:
    origin: int
    destination: int
    path: tuple[str, ...]
    issued_ms: int


class PopulationFlow:
    """Aggregate evacuation state, owned by the simulation.

    Agents start fleeing when the quake fires, one group per populated cell.
    Each tick a group advances one edge: along its adopted advisory when it has
    one, otherwise greedily toward the nearest secure cell over unblocked
    edges. Arrivals at secure cells become sheltered; fleeing + sheltered is
    conserved.
    """

    def __init__(self):
        self.groups: list[FlowGroup] = []
        self.sheltered = 0
        self.initial_fleeing = 0
        self.loads: dict[str, int] = {}
        self.advisories: dict[int, Advisory] = {}
        self.started = False

    def start(self, zm: ZoneMap, secure: set[int],
              trapped_per_cell: dict[int, int]) -> list[tuple[int, int]]:
        """Seed groups at quake time. Trapped survivors cannot flee. Returns
        (cell, count) pairs that shelter instantly because home was secure."""
        self.started = True
        instant = []
        for cell in zm.cells:
            mobile = cell.population - trapped_per_cell.get(cell.cell_id, 0)
            if mobile <= 0:
                continue
            self.initial_fleeing += mobile
            if cell.cell_id in secure:
                self.sheltered += mobile
                instant.append((cell.cell_id, mobile))
            else:
                self.groups.append(FlowGroup(cell.cell_id, mobile))
        return instant

    def fleeing(self) -> int:
        return sum(g.count for g in self.groups)

    def post_advisory(self, advisory: Advisory) -> None:
        self.advisories[advisory.origin] = advisory

    def step(self, graph: RoadGraph, secure: set[int]) -> list[tuple[int, int]]:
        """Advance every group one edge. Returns (cell, count) shelter arrivals;
        self.loads holds this tick's per-edge traffic for congestion checks."""
        dist = _distance_to_secure(graph, secure)
        loads: dict[str, int] = {}
        arrivals: list[tuple[int, int]] = []
        survivors: list[FlowGroup] = []
        for group in self.groups:
            advisory = self.advisories.get(group.cell)
            if advisory is not None and advisory.issued_ms > group.route_stamp:
                group.route = list(advisory.path)
                group.route_stamp = advisory.issued_ms
            edge = self._next_edge(graph, group, dist)
            if edge is None:
                survivors.append(group)
                continue
            loads[edge.edge_id] = loads.get(edge.edge_id, 0) + group.count
            group.cell = edge.v if group.cell == edge.u else edge.u
            if group.route and group.route[0] == edge.edge_id:
                group.route.pop(0)
            else:
                group.route = []
            if group.cell in secure:
                self.sheltered += group.count
                arrivals.append((group.cell, group.count))
            else:
                survivors.append(group)
        self.groups = survivors
        self.loads = loads
        return arrivals

    def _next_edge(self, graph: RoadGraph, group: FlowGroup, dist: dict[int, float]):
        if group.route:
            edge = graph.edge(group.route[0])
            if not edge.blocked and group.cell in (edge.u, edge.v):
                return edge
            group.route = []  # advisory path broke; fall back to greedy
        best = None
        here = dist.get(group.cell, math.inf)
        for edge, other in graph.neighbors(group.cell):
            if edge.blocked:
                continue
            d = dist.get(other, math.inf)
            if d < here and (best is None or d < best[0]):
                best = (d, edge)
        return best[1] if best else None


def _distance_to_secure(graph: RoadGraph, secure: set[int]) -> dict[int, float]:
    """Multi-source shortest distance (meters) to any secure cell over unblocked edges."""
    dist = {n: 0.0 for n in secure if n in graph._adj}
    heap = [(0.0, n) for n in sorted(dist)]
    heapq.heapify(heap)
    while heap:
        d, node = heapq.heappop(heap)
        if d > dist.get(node, math.inf):
            continue
        for edge, other in graph.neighbors(node):
            if edge.blocked:
                continue
            nd = d + edge.length_m
            if nd < dist.get(other, math.inf):
                dist[other] = nd
                heapq.heappush(heap, (nd, other))
    return dist
