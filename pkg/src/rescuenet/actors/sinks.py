"""Low-logic endpoints: ground stations, police, the satellite node, and the
seismic center that injects early warnings."""
from __future__ import annotations

from .base import Actor, Ctx
from .ids import ActorId


class GroundStation(Actor):
    """Satellite-capable relay and record keeper; acts on nothing."""

    def on_message(self, ctx: Ctx, src: str, msg_kind: str, body: dict) -> None:
        if msg_kind == "notify":
            ctx.trace("notify", {"from": src, **body})


class Police(Actor):
    """Pure notification sink."""

    def on_message(self, ctx: Ctx, src: str, msg_kind: str, body: dict) -> None:
        if msg_kind == "notify":
            ctx.trace("notify", {"from": src, **body})


class SatelliteNode(Actor):
    """Passive relay; routing models its links, it runs no logic of its own."""


class SeismicCenter(Actor):
    """Broadcasts the pre-quake early warning to the drone fleet when configured."""

    def __init__(self, actor_id: ActorId, drones: list[str]):
        super().__init__(actor_id)
        self.drones = sorted(drones)

    def on_command(self, ctx: Ctx, name: str, payload: dict) -> None:
        if name == "early_warning":
            ctx.trace("early_warning", {"lead_ms": payload.get("lead_ms", 0)})
            for drone in self.drones:
                ctx.send(drone, "early_warning", {})
