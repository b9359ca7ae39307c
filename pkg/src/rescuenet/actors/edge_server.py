"""Edge servers: aggregate sensor alarms in a sliding window and raise the
one-shot yellow alarm with an intensity estimate."""
from __future__ import annotations

from collections import deque

from .base import Actor, Ctx
from .ids import ActorId

DEFAULT_K = 3              # distinct sensors required
DEFAULT_WINDOW_MS = 2000


class EdgeServer(Actor):
    def __init__(self, actor_id: ActorId, cell_id: int, alpha: str,
                 ground_stations: list[str], k: int = DEFAULT_K,
                 window_ms: int = DEFAULT_WINDOW_MS):
        super().__init__(actor_id)
        self.cell_id = cell_id
        self.alpha = alpha
        self.ground_stations = list(ground_stations)
        self.k = k
        self.window_ms = window_ms
        self.yellow = False
        self._window: deque[tuple[int, str, float, int]] = deque()  # (t, sensor, measured, cell)

    def on_message(self, ctx: Ctx, src: str, msg_kind: str, body: dict) -> None:
        if msg_kind != "alert" or self.yellow:
            return
        self._window.append((ctx.now, body["sensor"], body["measured"], body["cell"]))
        floor = ctx.now - self.window_ms
        while self._window and self._window[0][0] < floor:
            self._window.popleft()
        distinct = {entry[1] for entry in self._window}
        if len(distinct) >= self.k:
            self.yellow = True
            estimate = sum(e[2] for e in self._window) / len(self._window)
            cells = sorted({e[3] for e in self._window})
            ctx.trace("yellow", {"sensors": sorted(distinct), "estimate": estimate,
                                 "cells": cells})
            report = {"source": self.key, "estimate": estimate, "cells": cells,
                      "declared_ms": ctx.now}
            ctx.send(self.alpha, "edge_report", report)
            for gs in self.ground_stations:
                ctx.send(gs, "edge_report", report)
