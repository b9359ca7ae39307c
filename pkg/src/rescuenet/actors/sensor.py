"""Ground-motion sensors: threshold alarms wired to an edge server, and for
high-risk zones a hardened line straight to the paired drone."""
from __future__ import annotations

from typing import Optional

from .base import Actor, Ctx
from .ids import ActorId


class Sensor(Actor):
    def __init__(self, actor_id: ActorId, cell_id: int, theta: float,
                 noise_sigma: float, edge_server: str,
                 paired_drone: Optional[str] = None):
        super().__init__(actor_id)
        self.cell_id = cell_id
        self.theta = theta
        self.noise_sigma = noise_sigma
        self.edge_server = edge_server
        self.paired_drone = paired_drone

    def on_timer(self, ctx: Ctx, name: str, payload: dict) -> None:
        if name != "sample":
            return
        amplitude = ctx.world.intensity(self.cell_id)
        measured = amplitude
        if self.noise_sigma > 0:
            measured += ctx.rng.gauss(0.0, self.noise_sigma)
        if measured >= self.theta:  # threshold is inclusive
            ctx.trace("alert", {"cell": self.cell_id, "measured": measured})
            body = {"sensor": self.key, "cell": self.cell_id,
                    "measured": measured, "sampled_ms": ctx.now}
            ctx.send(self.edge_server, "alert", body)
            if self.paired_drone is not None:
                # Same observation, second recipient: the paired drone's launch line.
                ctx.send(self.paired_drone, "alert", body)
