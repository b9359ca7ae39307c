"""Command helicopter (relay hub, launch authority, nurse watchdog) and the
backup helicopter (multi-zone surveillance, last-resort coverage and nursing)."""
from __future__ import annotations

from dataclasses import asdict
from typing import Optional

from .base import Actor, Ctx
from .drone import FleetEntry, NurseRole, ROLE_COVERAGE, ROLE_GATEWAY
from .ids import ActorId

# Report kinds the command helicopter mirrors to the crisis center.
FORWARDED_KINDS = ("edge_report", "coverage_up", "failure_notice",
                   "scan_report", "congestion_report", "advisory")


class HelicopterAlpha(Actor):
    """Every field report transits this actor; it relays each one to the crisis
    center twice under one msg_id: once terrestrially, once via satellite."""

    def __init__(self, actor_id: ActorId, crisis: str, beta: str, nurse: str,
                 fleet: dict[str, FleetEntry], beta_zones: list[str],
                 h_ms: int, miss_limit: int):
        super().__init__(actor_id)
        self.crisis = crisis
        self.beta = beta
        self.current_nurse = nurse
        self.fleet = fleet
        self.beta_zones = list(beta_zones)
        self.h_ms = h_ms
        self.miss_limit = miss_limit
        self.last_summary_ms = 0
        self.activated = False

    def on_start(self, ctx: Ctx) -> None:
        ctx.schedule(self.h_ms, {"ev": "timer", "name": "nurse_watch"})

    def on_message(self, ctx: Ctx, src: str, msg_kind: str, body: dict) -> None:
        if msg_kind == "edge_report" and not self.activated:
            self._activate(ctx)
        if msg_kind == "launched":
            entry = self.fleet.get(body["drone"])
            if entry is not None and entry.status != "failed":
                entry.status = "enroute"
                if body.get("zone"):
                    entry.zone = body["zone"]
            return  # fleet bookkeeping only, not mirrored to crisis
        if msg_kind == "nurse_summary":
            if body["nurse"] == self.current_nurse:
                self.last_summary_ms = max(self.last_summary_ms, body["sent_ms"])
            return
        if msg_kind == "coverage_up":
            entry = self.fleet.get(body["drone"])
            if entry is not None and entry.status != "failed":
                entry.status = "onstation"
                if body.get("zone"):
                    entry.zone = body["zone"]
        elif msg_kind == "failure_notice":
            entry = self.fleet.get(body["drone"])
            if entry is not None:
                entry.status = "failed"
                entry.zone = None
        if msg_kind in FORWARDED_KINDS:
            self._forward(ctx, msg_kind, body)

    def _activate(self, ctx: Ctx) -> None:
        """First confirmed quake report: launch the fleet, task the backup."""
        self.activated = True
        for key in sorted(self.fleet, key=lambda k: self.fleet[k].index):
            if self.fleet[key].status == "docked":
                ctx.send(key, "launch_cmd", {})
        if self.beta_zones:
            ctx.send(self.beta, "surveil", {"zones": list(self.beta_zones)})

    def _forward(self, ctx: Ctx, msg_kind: str, body: dict) -> None:
        msg_id = ctx.new_msg_id()
        ctx.send(self.crisis, msg_kind, body, mode="terrestrial", msg_id=msg_id)
        ctx.send(self.crisis, msg_kind, body, mode="satellite", msg_id=msg_id)

    def on_timer(self, ctx: Ctx, name: str, payload: dict) -> None:
        if name != "nurse_watch":
            return
        if ctx.now - self.last_summary_ms > self.miss_limit * self.h_ms:
            self._replace_nurse(ctx)
        ctx.schedule(self.h_ms, {"ev": "timer", "name": "nurse_watch"})

    def _replace_nurse(self, ctx: Ctx) -> None:
        previous = self.current_nurse
        prev_entry = self.fleet.get(previous)
        orphan_zone = None
        if prev_entry is not None:
            prev_entry.status = "failed"
            orphan_zone = prev_entry.zone
            prev_entry.zone = None
        candidates = [e for e in self.fleet.values()
                      if e.role == ROLE_COVERAGE and e.status == "onstation"]
        if candidates:
            successor = min(candidates, key=lambda e: e.index).key
        else:
            successor = self.beta
        ledger = {key: ctx.now for key, entry in sorted(self.fleet.items())
                  if entry.status in ("enroute", "onstation") and key != successor}
        fleet_copy = {key: asdict(entry) for key, entry in sorted(self.fleet.items())}
        ctx.send(successor, "promote",
                 {"previous": previous, "ledger": ledger, "fleet": fleet_copy})
        self.current_nurse = successor
        self.last_summary_ms = ctx.now  # grace until the successor's first summary
        succ_entry = self.fleet.get(successor)
        succ_zone = None
        if succ_entry is not None:
            succ_zone = succ_entry.zone
            succ_entry.role = "nursing"
            succ_entry.zone = None
        for key in sorted(self.fleet, key=lambda k: self.fleet[k].index):
            if self.fleet[key].status != "failed":
                ctx.send(key, "nurse_assign", {"nurse": successor})
        # Zones stranded by the swap get replacements immediately.
        for zone in [z for z in (orphan_zone, succ_zone) if z is not None]:
            self._reassign(ctx, zone)

    def _reassign(self, ctx: Ctx, zone: str) -> None:
        from .drone import SpareCandidate, choose_spare
        target_xy = ctx.world.zone_centroid(zone)
        candidates = []
        for entry in self.fleet.values():
            if entry.role == ROLE_COVERAGE and entry.status == "docked" and entry.zone is None:
                x, y = ctx.world.cell_xy(entry.station_cell)
                candidates.append(SpareCandidate(entry.key, entry.index, x, y))
        chosen = choose_spare(candidates, target_xy)
        if chosen is not None:
            self.fleet[chosen].zone = zone
            ctx.trace("assign", {"target": chosen, "zone": zone})
            ctx.send(chosen, "assign", {"zone": zone})
        else:
            ctx.trace("assign", {"target": self.beta, "zone": zone})
            ctx.send(self.beta, "assign", {"zone": zone})


class HelicopterBeta(Actor):
    """Surveillance helicopter: covers any number of zones at once with no
    flight kinematics, and inherits the nursing duty when no drone can."""

    def __init__(self, actor_id: ActorId, alpha: str, h_ms: int, miss_limit: int):
        super().__init__(actor_id)
        self.alpha = alpha
        self.h_ms = h_ms
        self.miss_limit = miss_limit
        self.zones: list[str] = []
        self.nurse_role: Optional[NurseRole] = None

    def on_message(self, ctx: Ctx, src: str, msg_kind: str, body: dict) -> None:
        if msg_kind == "surveil":
            for zone in body["zones"]:
                self._cover(ctx, zone)
        elif msg_kind == "assign":
            self._cover(ctx, body["zone"])
        elif msg_kind == "promote":
            self.nurse_role = NurseRole(self.key, self.alpha, self.key,
                                        self.h_ms, self.miss_limit,
                                        {k: FleetEntry(**e) for k, e in body["fleet"].items()})
            self.nurse_role.ledger = dict(body["ledger"])
            self.nurse_role.beta_self_cover = self._cover
            ctx.trace("nurse_promote", {"previous": body["previous"]})
            ctx.schedule(self.h_ms, {"ev": "timer", "name": "nurse_tick"})
        elif msg_kind == "heartbeat" and self.nurse_role is not None:
            self.nurse_role.note_heartbeat(body["drone"], body["sent_ms"])
        elif msg_kind == "launched" and self.nurse_role is not None:
            self.nurse_role.note_launched(body["drone"], body.get("zone"), body["eta_abs_ms"])
        elif msg_kind == "coverage_up" and self.nurse_role is not None:
            self.nurse_role.note_coverage(body["drone"], body.get("zone"))

    def _cover(self, ctx: Ctx, zone: str) -> None:
        if zone in self.zones:
            return
        self.zones.append(zone)
        ctx.trace("assign", {"target": self.key, "zone": zone})
        centroid_cell = ctx.world.zone_centroid_cell(zone)
        ctx.send(self.alpha, "coverage_up",
                 {"drone": self.key, "zone": zone,
                  "intensity": ctx.world.intensity(centroid_cell)})

    def on_timer(self, ctx: Ctx, name: str, payload: dict) -> None:
        if name == "nurse_tick" and self.nurse_role is not None:
            self.nurse_role.tick(ctx)
            ctx.schedule(self.h_ms, {"ev": "timer", "name": "nurse_tick"})
