"""Actor plumbing: the per-dispatch context and the handler base class."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Optional, TYPE_CHECKING

from ..engine import RngStream
from .ids import ActorId

if TYPE_CHECKING:
    from ..sim import WorldView


@dataclass
class Ctx:
    """Everything a transition may touch besides its own actor state.

    Actors never read each other's state; they observe the world through
    `world` (read-mostly; survivor rescue and scan counters are the sanctioned
    mutations) and affect each other only via send().
    """
    now: int
    rng: RngStream
    world: "WorldView"
    send: Callable[..., Any]          # (dst, msg_kind, body, mode="any", msg_id=None)
    schedule: Callable[[int, dict], Any]   # (dt_ms, payload) -> event for this actor
    trace: Callable[[str, dict], dict]     # (kind, payload)
    new_msg_id: Callable[[], str]


class Actor:
    """Base event handler. Subclasses override the on_* hooks they care about."""

    def __init__(self, actor_id: ActorId):
        self.actor_id = actor_id
        self.failed = False

    @property
    def key(self) -> str:
        return self.actor_id.encode()

    def on_start(self, ctx: Ctx) -> None:
        """Schedule initial timers. Called once before the clock starts."""

    def handle(self, ctx: Ctx, payload: dict) -> None:
        ev = payload.get("ev")
        if ev == "deliver":
            self.on_message(ctx, payload["src"], payload["msg_kind"], payload["body"])
        elif ev == "timer":
            self.on_timer(ctx, payload["name"], payload)
        elif ev == "cmd":
            self.on_command(ctx, payload["name"], payload)
        else:
            raise RuntimeError(f"{self.key}: unknown event payload {payload!r}")

    def on_message(self, ctx: Ctx, src: str, msg_kind: str, body: dict) -> None:
        pass

    def on_timer(self, ctx: Ctx, name: str, payload: dict) -> None:
        pass

    def on_command(self, ctx: Ctx, name: str, payload: dict) -> None:
        pass

    def fail(self, ctx: Ctx) -> None:
        """Silent permanent death: trace the transition, send nothing ever again."""
        if not self.failed:
            self.failed = True
            ctx.trace("fail", {})
