"""Drones: auto-deploying zone coverage, relay gateways, and the nursing role
that watches heartbeats and replaces dead coverers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .base import Actor, Ctx
from .ids import ActorId

ROLE_COVERAGE = "coverage"
ROLE_NURSING = "nursing"
ROLE_GATEWAY = "gateway"

DEFAULT_HEARTBEAT_MS = 5000
DEFAULT_MISS_LIMIT = 3
DEFAULT_SPEED_MPS = 20.0
DEFAULT_SCAN_PERIOD_MS = 2000


@dataclass
class FleetEntry:
    """One drone as seen by a coordinator (nurse or command helicopter)."""
    key: str
    index: int
    role: str
    station_cell: int
    zone: Optional[str]        # assigned zone, None for spares/gateways/nurse
    status: str = "docked"     # docked | enroute | onstation | failed


@dataclass(frozen=True)
class SpareCandidate:
    key: str
    index: int
    x: float
    y: float


def choose_spare(candidates: list[SpareCandidate],
                 target_xy: tuple[float, float]) -> Optional[str]:
    """Pick the replacement for an uncovered zone: nearest station by Euclidean
    distance, ties to the smallest drone index. None when no spare exists."""
    best = None
    for cand in candidates:
        d = math.hypot(cand.x - target_xy[0], cand.y - target_xy[1])
        rank = (d, cand.index)
        if best is None or rank < best[0]:
            best = (rank, cand.key)
    return best[1] if best else None


class NurseRole:
    """Heartbeat bookkeeping shared by the nursing drone and the backup
    helicopter. Tracks last-heard times (sender clock basis), declares a drone
    failed after miss_limit silent periods, and arranges replacement coverage."""

    def __init__(self, owner: str, alpha: str, beta: str, h_ms: int, miss_limit: int,
                 fleet: dict[str, FleetEntry]):
        self.owner = owner
        self.alpha = alpha
        self.beta = beta
        self.h_ms = h_ms
        self.miss_limit = miss_limit
        self.fleet = fleet
        # When the backup helicopter runs the ledger itself, zone fallback is a
        # local action rather than a message to self.
        self.beta_self_cover = None
        # Gateways hold station from the start; everyone else enters on launch.
        self.ledger: dict[str, int] = {
            entry.key: 0 for entry in fleet.values()
            if entry.role == ROLE_GATEWAY and entry.status != "failed"
        }

    def note_launched(self, drone: str, zone: Optional[str], eta_abs_ms: int) -> None:
        entry = self.fleet.get(drone)
        if entry is None or entry.status == "failed":
            return
        entry.status = "enroute"
        if zone is not None:
            entry.zone = zone
        # Grace until expected arrival: heartbeats only start on station.
        self.ledger[drone] = eta_abs_ms

    def note_heartbeat(self, drone: str, sent_ms: int) -> None:
        if drone in self.fleet and self.fleet[drone].status != "failed":
            self.ledger[drone] = max(self.ledger.get(drone, 0), sent_ms)

    def note_coverage(self, drone: str, zone: Optional[str]) -> None:
        entry = self.fleet.get(drone)
        if entry is not None and entry.status != "failed":
            entry.status = "onstation"
            if zone is not None:
                entry.zone = zone

    def note_failed(self, drone: str) -> None:
        entry = self.fleet.get(drone)
        if entry is not None:
            entry.status = "failed"
        self.ledger.pop(drone, None)

    def tick(self, ctx: Ctx) -> None:
        """One watch pass: declare overdue drones failed, refill their zones,
        then report liveness upstream."""
        threshold = self.miss_limit * self.h_ms
        overdue = [key for key, seen in self.ledger.items() if ctx.now - seen > threshold]
        for key in sorted(overdue, key=lambda k: self.fleet[k].index):
            entry = self.fleet[key]
            entry.status = "failed"
            del self.ledger[key]
            zone = entry.zone
            ctx.trace("failure_notice", {"drone": key, "zone": zone})
            ctx.send(self.alpha, "failure_notice", {"drone": key, "zone": zone})
            if zone is not None:
                entry.zone = None
                self.reassign(ctx, zone)
        ctx.send(self.alpha, "nurse_summary",
                 {"nurse": self.owner, "sent_ms": ctx.now, "monitored": sorted(self.ledger)})

    def reassign(self, ctx: Ctx, zone: str) -> None:
        target_xy = ctx.world.zone_centroid(zone)
        candidates = []
        for entry in self.fleet.values():
            if entry.role == ROLE_COVERAGE and entry.status == "docked" and entry.zone is None:
                x, y = ctx.world.cell_xy(entry.station_cell)
                candidates.append(SpareCandidate(entry.key, entry.index, x, y))
        chosen = choose_spare(candidates, target_xy)
        if chosen is not None:
            self.fleet[chosen].zone = zone  # committed; no longer a spare
            ctx.trace("assign", {"target": chosen, "zone": zone})
            ctx.send(chosen, "assign", {"zone": zone})
        elif self.beta_self_cover is not None:
            self.beta_self_cover(ctx, zone)
        else:
            ctx.trace("assign", {"target": self.beta, "zone": zone})
            ctx.send(self.beta, "assign", {"zone": zone})


class Drone(Actor):
    def __init__(self, actor_id: ActorId, role: str, station_cell: int,
                 zone: Optional[str], alpha: str, beta: str, nurse: str,
                 speed_mps: float = DEFAULT_SPEED_MPS,
                 h_ms: int = DEFAULT_HEARTBEAT_MS,
                 miss_limit: int = DEFAULT_MISS_LIMIT,
                 scan_period_ms: int = DEFAULT_SCAN_PERIOD_MS,
                 hazard_rate: float = 0.0):
        super().__init__(actor_id)
        self.role = role
        self.station_cell = station_cell
        self.zone = zone
        self.alpha = alpha
        self.beta = beta
        self.nurse = nurse
        self.speed_mps = speed_mps
        self.h_ms = h_ms
        self.miss_limit = miss_limit
        self.scan_period_ms = scan_period_ms
        self.hazard_rate = hazard_rate
        self.state = "docked"
        self.position_cell = station_cell
        self.nurse_role: Optional[NurseRole] = None

    def on_start(self, ctx: Ctx) -> None:
        if self.role == ROLE_GATEWAY:
            # Fixed relay waypoint: always on station, heartbeats from the start.
            self.state = "onstation"
            ctx.schedule(self.h_ms, {"ev": "timer", "name": "heartbeat"})
        elif self.role == ROLE_NURSING:
            ctx.schedule(self.h_ms, {"ev": "timer", "name": "nurse_tick"})

    def install_nurse(self, fleet: dict[str, FleetEntry]) -> None:
        self.nurse_role = NurseRole(self.key, self.alpha, self.beta,
                                    self.h_ms, self.miss_limit, fleet)

    # -- triggers ---------------------------------------------------------

    def on_command(self, ctx: Ctx, name: str, payload: dict) -> None:
        if name == "kill":
            self.fail(ctx)
        elif name == "local_quake":
            self._launch(ctx, "local_quake")

    def on_message(self, ctx: Ctx, src: str, msg_kind: str, body: dict) -> None:
        if msg_kind == "alert":
            self._launch(ctx, "paired_sensor")
        elif msg_kind == "launch_cmd":
            self._launch(ctx, "launch_cmd")
        elif msg_kind == "early_warning":
            self._launch(ctx, "early_warning")
        elif msg_kind == "assign":
            if self.state == "docked" and self.role == ROLE_COVERAGE:
                self.zone = body["zone"]
                self._launch(ctx, "reassign")
        elif msg_kind == "nurse_assign":
            self.nurse = body["nurse"]
        elif msg_kind == "promote":
            self._become_nurse(ctx, body)
        elif msg_kind == "heartbeat" and self.nurse_role is not None:
            self.nurse_role.note_heartbeat(body["drone"], body["sent_ms"])
        elif msg_kind == "launched" and self.nurse_role is not None:
            self.nurse_role.note_launched(body["drone"], body.get("zone"), body["eta_abs_ms"])
        elif msg_kind == "coverage_up" and self.nurse_role is not None:
            self.nurse_role.note_coverage(body["drone"], body.get("zone"))
        elif msg_kind == "failure_notice" and self.nurse_role is not None:
            self.nurse_role.note_failed(body["drone"])

    def _launch(self, ctx: Ctx, trigger: str) -> None:
        # Idempotent: repeat triggers while airborne are no-ops, and a drone
        # with no zone to cover (spares, the nurse) sits tight.
        if self.state != "docked" or self.zone is None or self.role != ROLE_COVERAGE:
            return
        dist_m = ctx.world.distance_cells_m(ctx.world.cell_xy(self.station_cell),
                                            ctx.world.zone_centroid(self.zone))
        eta_ms = int(round(dist_m / self.speed_mps * 1000.0))
        self.state = "enroute"
        ctx.trace("launch", {"zone": self.zone, "eta_ms": eta_ms, "trigger": trigger})
        body = {"drone": self.key, "zone": self.zone, "eta_abs_ms": ctx.now + eta_ms}
        ctx.send(self.alpha, "launched", body)
        if self.nurse != self.key:
            ctx.send(self.nurse, "launched", body)
        ctx.schedule(eta_ms, {"ev": "timer", "name": "arrive"})

    def _become_nurse(self, ctx: Ctx, body: dict) -> None:
        self.role = ROLE_NURSING
        self.zone = None
        self.nurse = self.key
        fleet = {k: FleetEntry(**e) for k, e in body["fleet"].items()}
        self.nurse_role = NurseRole(self.key, self.alpha, self.beta,
                                    self.h_ms, self.miss_limit, fleet)
        self.nurse_role.ledger = dict(body["ledger"])
        ctx.trace("nurse_promote", {"previous": body["previous"]})
        ctx.schedule(self.h_ms, {"ev": "timer", "name": "nurse_tick"})

    # -- timers -----------------------------------------------------------

    def on_timer(self, ctx: Ctx, name: str, payload: dict) -> None:
        if name == "arrive":
            self._arrive(ctx)
        elif name == "heartbeat":
            self._heartbeat(ctx)
        elif name == "scan":
            self._scan(ctx)
        elif name == "nurse_tick" and self.nurse_role is not None:
            self.nurse_role.tick(ctx)
            ctx.schedule(self.h_ms, {"ev": "timer", "name": "nurse_tick"})

    def _arrive(self, ctx: Ctx) -> None:
        if self.state != "enroute":
            return
        self.state = "onstation"
        self.position_cell = ctx.world.zone_centroid_cell(self.zone)
        ctx.trace("arrive", {"zone": self.zone})
        body = {"drone": self.key, "zone": self.zone,
                "intensity": ctx.world.intensity(self.position_cell)}
        ctx.send(self.alpha, "coverage_up", body)
        if self.nurse != self.key:
            ctx.send(self.nurse, "coverage_up", body)
        ctx.schedule(self.h_ms, {"ev": "timer", "name": "heartbeat"})
        ctx.schedule(self.scan_period_ms, {"ev": "timer", "name": "scan"})

    def _heartbeat(self, ctx: Ctx) -> None:
        if self.hazard_rate > 0 and ctx.rng.bernoulli(self.hazard_rate):
            self.fail(ctx)
            return
        ctx.trace("heartbeat", {"to": self.nurse})
        if self.nurse != self.key:
            ctx.send(self.nurse, "heartbeat", {"drone": self.key, "sent_ms": ctx.now})
        ctx.schedule(self.h_ms, {"ev": "timer", "name": "heartbeat"})

    def _scan(self, ctx: Ctx) -> None:
        if self.state != "onstation":
            return
        self._scan_survivors(ctx)
        self._scan_congestion(ctx)
        self._issue_advisories(ctx)
        ctx.schedule(self.scan_period_ms, {"ev": "timer", "name": "scan"})

    def _scan_survivors(self, ctx: Ctx) -> None:
        entries = []
        for site in ctx.world.sites_near(self.position_cell):
            newly = ctx.world.scan_site(site, ctx.rng)
            entries.append({"cell": site.cell_id, "newly": newly,
                            "intensity": ctx.world.intensity(site.cell_id)})
        ctx.trace("scan", {"zone": self.zone, "sites": entries})
        hits = [e for e in entries if e["newly"] > 0]
        if hits:
            ctx.send(self.alpha, "scan_report", {"drone": self.key, "sites": hits})

    def _scan_congestion(self, ctx: Ctx) -> None:
        edges = ctx.world.congested_near(self.position_cell)
        if edges:  # empty congestion reports are suppressed
            ctx.trace("congestion", {"edges": edges})
            ctx.send(self.alpha, "congestion_report", {"drone": self.key, "edges": edges})

    def _issue_advisories(self, ctx: Ctx) -> None:
        for cell in ctx.world.cells_needing_advisory(self.position_cell):
            plan = ctx.world.plan_evacuation(cell)
            if plan is None:
                continue
            ctx.world.post_advisory(cell, plan)
            ctx.trace("advisory", {"origin": cell, "destination": plan.destination,
                                   "path": list(plan.path)})
            ctx.send(self.alpha, "advisory", {"drone": self.key, "origin": cell,
                                              "destination": plan.destination,
                                              "path": list(plan.path)})
