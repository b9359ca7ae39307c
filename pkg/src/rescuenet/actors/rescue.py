"""Ground rescue teams: follow safe routes edge by edge, dig, report back."""
from __future__ import annotations

from typing import Optional

from .base import Actor, Ctx
from .ids import ActorId

DEFAULT_RESCUE_RATE = 2        # survivors freed per tick on site
DEFAULT_MOVE_TICK_MS = 1000    # one road edge per tick


class RescueTeam(Actor):
    def __init__(self, actor_id: ActorId, start_cell: int, crisis: str,
                 rescue_rate: int = DEFAULT_RESCUE_RATE,
                 move_tick_ms: int = DEFAULT_MOVE_TICK_MS):
        super().__init__(actor_id)
        self.cell = start_cell
        self.crisis = crisis
        self.rescue_rate = rescue_rate
        self.move_tick_ms = move_tick_ms
        self.state = "idle"        # idle | moving | rescuing | blocked
        self.target: Optional[int] = None
        self.path: list[str] = []

    def on_message(self, ctx: Ctx, src: str, msg_kind: str, body: dict) -> None:
        if msg_kind == "dispatch":
            self.target = body["cell"]
            self._plan(ctx)
        elif msg_kind == "replan" and self.state == "blocked":
            self._plan(ctx)

    def _plan(self, ctx: Ctx) -> None:
        if self.target is None:
            return
        if self.cell == self.target:
            self.state = "rescuing"
            ctx.schedule(self.move_tick_ms, {"ev": "timer", "name": "tick"})
            return
        plan = ctx.world.plan_route(self.cell, self.target)
        if plan is None:
            self.state = "blocked"
            ctx.trace("blocked", {"cell": self.cell, "target": self.target, "edge": None})
            ctx.send(self.crisis, "team_blocked", {"cell": self.cell, "target": self.target})
            return
        self.path = list(plan.path)
        self.state = "moving"
        ctx.schedule(self.move_tick_ms, {"ev": "timer", "name": "tick"})

    def on_timer(self, ctx: Ctx, name: str, payload: dict) -> None:
        if name != "tick":
            return
        if self.state == "moving":
            self._advance(ctx)
        elif self.state == "rescuing":
            self._rescue(ctx)

    def _advance(self, ctx: Ctx) -> None:
        if not self.path:
            self.state = "rescuing"
            self._rescue(ctx)
            return
        edge_id = self.path[0]
        if ctx.world.edge_blocked(edge_id):
            # Never cross a blocked edge; hold position until routes are refreshed.
            self.state = "blocked"
            ctx.trace("blocked", {"cell": self.cell, "target": self.target, "edge": edge_id})
            ctx.send(self.crisis, "team_blocked", {"cell": self.cell, "target": self.target})
            return
        self.path.pop(0)
        self.cell = ctx.world.edge_other_end(edge_id, self.cell)
        if self.cell == self.target:
            self.state = "rescuing"
        ctx.schedule(self.move_tick_ms, {"ev": "timer", "name": "tick"})

    def _rescue(self, ctx: Ctx) -> None:
        site = ctx.world.site_at(self.target)
        outstanding = site.detected - site.rescued if site is not None else 0
        if outstanding > 0:
            freed = min(self.rescue_rate, outstanding)
            ctx.world.rescue(site, freed)
            ctx.trace("rescue", {"cell": self.target, "freed": freed,
                                 "rescued_total": site.rescued})
            outstanding = site.detected - site.rescued
        if outstanding > 0:
            ctx.schedule(self.move_tick_ms, {"ev": "timer", "name": "tick"})
        else:
            rescued_total = site.rescued if site is not None else 0
            ctx.send(self.crisis, "team_complete",
                     {"cell": self.target, "rescued_total": rescued_total})
            self.state = "idle"
            self.target = None
            self.path = []
