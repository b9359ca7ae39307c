"""Communication fabric: typed links, quake disruption, routing, message transport."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .engine import Engine, RngStream

DEFAULT_BETA_D = 0.8           # wireless fragility coefficient
DEFAULT_P2P_LATENCY_MS = 20
DEFAULT_WIRELESS_LATENCY_MS = 40
DEFAULT_SATELLITE_LATENCY_MS = 600
HARDENED_MULTIPLIER = 0.5      # hardened point-to-point pairs fail at half the rate


class LinkKind(str, Enum):
    POINT_TO_POINT = "p2p"
    WIRELESS = "wireless"
    SATELLITE = "satellite"


@dataclass
class Link:
    link_id: str
    a: str                 # encoded actor id, a < b lexicographically
    b: str
    kind: LinkKind
    base_latency_ms: int
    up: bool = True
    hardened: bool = False

    def __post_init__(self):
        if self.hardened and self.kind is not LinkKind.POINT_TO_POINT:
            raise ValueError(f"link {self.link_id}: only point-to-point links can be hardened")
        if self.base_latency_ms <= 0:
            raise ValueError(f"link {self.link_id}: latency must be positive")

    def other(self, node: str) -> str:
        return self.b if node == self.a else self.a


def make_link_id(kind: LinkKind, x: str, y: str) -> str:
    a, b = sorted((x, y))
    return f"{kind.value}:{a}|{b}"


@dataclass
class LinkTable:
    """All links plus per-actor metadata routing needs."""
    links: list[Link]
    satellite_capable: frozenset[str]
    actor_cells: dict[str, int]            # actor -> cell id; satellite has none
    satellite: str = "Satellite:0"
    by_id: dict[str, Link] = field(default_factory=dict, repr=False)
    _p2p: dict[tuple[str, str], Link] = field(default_factory=dict, repr=False)
    _wireless_adj: dict[str, list[Link]] = field(default_factory=dict, repr=False)
    _sat_link: dict[str, Link] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.links.sort(key=lambda l: l.link_id)
        for link in self.links:
            if link.link_id in self.by_id:
                raise ValueError(f"duplicate link id {link.link_id}")
            self.by_id[link.link_id] = link
            if link.kind is LinkKind.POINT_TO_POINT:
                self._p2p[(link.a, link.b)] = link
            elif link.kind is LinkKind.WIRELESS:
                self._wireless_adj.setdefault(link.a, []).append(link)
                self._wireless_adj.setdefault(link.b, []).append(link)
            else:
                endpoint = link.other(self.satellite)
                self._sat_link[endpoint] = link
        for links in self._wireless_adj.values():
            links.sort(key=lambda l: l.link_id)

    def p2p_between(self, x: str, y: str) -> Optional[Link]:
        a, b = sorted((x, y))
        return self._p2p.get((a, b))

    def wireless_links(self, node: str) -> list[Link]:
        return self._wireless_adj.get(node, [])

    def satellite_link(self, node: str) -> Optional[Link]:
        return self._sat_link.get(node)


def disruption_probability(intensity: float, beta_d: float = DEFAULT_BETA_D) -> float:
    """Chance a wireless link drops when the quake fires."""
    return min(1.0, beta_d * intensity / 10.0)


def apply_disruption(table: LinkTable, intensity: dict[int, float], rng: RngStream,
                     beta_d: float = DEFAULT_BETA_D,
                     prob_multiplier: Optional[dict[str, float]] = None,
                     force_down: Optional[set[str]] = None) -> list[Link]:
    """Sample quake damage to every link; returns the links newly taken down.

    Satellite links never fail. Hardened pairs halve the probability; extra
    per-link multipliers (e.g. mid-grade sensor uplinks) come via
    prob_multiplier. Links named in force_down drop with certainty. Every
    non-satellite link consumes one draw so stream use is stable.
    """
    prob_multiplier = prob_multiplier or {}
    force_down = force_down or set()
    downed = []
    for link in table.links:  # already sorted by link_id
        if link.kind is LinkKind.SATELLITE:
            continue
        cell = _disruption_cell(table, link)
        p = disruption_probability(intensity.get(cell, 0.0) if cell is not None else 0.0, beta_d)
        if link.hardened:
            p *= HARDENED_MULTIPLIER
        p *= prob_multiplier.get(link.link_id, 1.0)
        hit = rng.bernoulli(p)
        if link.link_id in force_down:
            hit = True
        if hit and link.up:
            link.up = False
            downed.append(link)
    return downed


def _disruption_cell(table: LinkTable, link: Link) -> Optional[int]:
    # Shaking sampled at the lower-id endpoint's cell; falls back to the other
    # endpoint for placeless actors.
    for node in (link.a, link.b):
        if node in table.actor_cells:
            return table.actor_cells[node]
    return None


@dataclass(frozen=True)
class Route:
    kind: str                  # "direct" | "multihop" | "satellite"
    path: tuple[str, ...]      # link ids in traversal order
    latency_ms: int


def route(table: LinkTable, src: str, dst: str, mode: str = "any") -> Optional[Route]:
    """Resolve a path by preference: direct point-to-point, then cheapest wireless
    multihop, then satellite relay. Returns None when nothing is available.

    mode restricts the search: "terrestrial" skips the satellite fallback,
    "satellite" forces the relay. Wireless ties break on the lexicographically
    smallest link-id sequence, so routes are deterministic.
    """
    if mode not in ("any", "terrestrial", "satellite"):
        raise ValueError(f"unknown routing mode {mode!r}")
    if src == dst:
        raise ValueError("routing to self")
    if mode in ("any", "terrestrial"):
        direct = table.p2p_between(src, dst)
        if direct is not None and direct.up:
            return Route("direct", (direct.link_id,), direct.base_latency_ms)
        hop = _min_latency_wireless(table, src, dst)
        if hop is not None:
            return hop
    if mode in ("any", "satellite"):
        up_src = table.satellite_link(src)
        up_dst = table.satellite_link(dst)
        if up_src is not None and up_dst is not None:
            return Route("satellite", (up_src.link_id, up_dst.link_id),
                         up_src.base_latency_ms + up_dst.base_latency_ms)
    return None


def _min_latency_wireless(table: LinkTable, src: str, dst: str) -> Optional[Route]:
    # Dijkstra keyed on (latency, link-id sequence). With strictly positive
    # latencies the lexicographic tie-break is prefix-consistent, so keeping a
    # single best label per node is sound.
    heap: list[tuple[int, tuple[str, ...], str]] = [(0, (), src)]
    settled: set[str] = set()
    while heap:
        cost, path, node = heapq.heappop(heap)
        if node in settled:
            continue
        settled.add(node)
        if node == dst:
            return Route("multihop", path, cost) if path else None
        for link in table.wireless_links(node):
            if not link.up:
                continue
            nxt = link.other(node)
            if nxt in settled:
                continue
            heapq.heappush(heap, (cost + link.base_latency_ms, path + (link.link_id,), nxt))
    return None


class Network:
    """Message transport over the link table.

    Routes are resolved once at send time and frozen into the delivery event.
    Receivers deduplicate on msg_id at the actor boundary; duplicates are
    delivered and traced but never handed to the actor twice.
    """

    def __init__(self, engine: Engine, table: LinkTable):
        self.engine = engine
        self.table = table
        self._msg_counter = 0
        self._seen: dict[str, set[str]] = {}

    def next_msg_id(self) -> str:
        self._msg_counter += 1
        return f"m{self._msg_counter:06d}"

    def send(self, src: str, dst: str, msg_kind: str, body: dict,
             mode: str = "any", msg_id: Optional[str] = None) -> Optional[Route]:
        now = self.engine.clock
        if msg_id is None:
            msg_id = self.next_msg_id()
        choice = route(self.table, src, dst, mode)
        if choice is None:
            reason = "no_terrestrial_path" if mode == "terrestrial" else "no_path"
            self.engine.emit(src, "msg_drop",
                             {"msg_id": msg_id, "dst": dst, "msg_kind": msg_kind, "reason": reason})
            return None
        self.engine.emit(src, "msg_send",
                         {"msg_id": msg_id, "dst": dst, "msg_kind": msg_kind,
                          "route": choice.kind, "path": list(choice.path),
                          "latency_ms": choice.latency_ms, "body": body})
        self.engine.schedule(now + choice.latency_ms, dst,
                             {"ev": "deliver", "msg_id": msg_id, "src": src, "dst": dst,
                              "msg_kind": msg_kind, "body": body, "path": list(choice.path),
                              "latency_ms": choice.latency_ms, "sent_ms": now})
        return choice

    def accept(self, payload: dict) -> Optional[dict]:
        """Trace a physical delivery; returns the payload once per msg_id, else None."""
        dst = payload["dst"]
        self.engine.emit(dst, "msg_deliver",
                         {"msg_id": payload["msg_id"], "src": payload["src"],
                          "msg_kind": payload["msg_kind"], "path": payload["path"],
                          "latency_ms": payload["latency_ms"]})
        seen = self._seen.setdefault(dst, set())
        if payload["msg_id"] in seen:
            self.engine.emit(dst, "msg_dedup",
                             {"msg_id": payload["msg_id"], "src": payload["src"],
                              "msg_kind": payload["msg_kind"]})
            return None
        seen.add(payload["msg_id"])
        return payload
