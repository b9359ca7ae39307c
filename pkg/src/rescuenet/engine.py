"""Deterministic discrete-event core: clock, ordered queue, seeded streams, JSONL trace."""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass
from typing import Any, Callable, Optional, TextIO

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """SplitMix64 finalizer; the bit-mixing step behind every stream in the simulator."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h = ((h ^ byte) * 0x100000001B3) & _MASK64
    return h


class RngStream:
    """A SplitMix64 sequence. Every random decision made by one actor comes off
    one of these, so replaying a run never depends on global RNG state."""

    __slots__ = ("_state",)

    def __init__(self, state: int):
        self._state = state & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix64(self._state)

    def random(self) -> float:
        # 53-bit mantissa, uniform in [0, 1)
        return (self.next_u64() >> 11) * 2.0 ** -53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def gauss(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        # Box-Muller, cosine branch only: exactly two draws per call, no cached
        # second value, so interleaving with other draws stays reproducible.
        u1 = (self.next_u64() + 1) * 2.0 ** -64  # (0, 1], log() is safe
        u2 = self.random()
        return mu + sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

    def binomial(self, n: int, p: float) -> int:
        return sum(1 for _ in range(n) if self.random() < p)

    def randrange(self, n: int) -> int:
        # Modulo bias is irrelevant at the scales used here; determinism is not.
        return self.next_u64() % n


def actor_rng(master_seed: int, actor_key: str) -> RngStream:
    """Derive the independent stream for one actor.

    State is a double SplitMix64 mix of the master seed with an FNV-1a hash of
    the actor's stable string key, so every (seed, actor) pair gets its own
    sequence and changing the seed perturbs every actor's stream.
    """
    return RngStream(_mix64(_mix64(master_seed & _MASK64) ^ _fnv1a64(actor_key.encode("utf-8"))))


class SchedulingInPastError(RuntimeError):
    """Raised when an event is scheduled before the current clock; a protocol bug."""


class InvariantViolation(RuntimeError):
    """A runtime safety property failed mid-run."""

    def __init__(self, name: str, t_ms: int, detail: str = ""):
        self.name = name
        self.t_ms = t_ms
        self.detail = detail
        super().__init__(f"invariant '{name}' violated at t={t_ms}ms" + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class SimEvent:
    t_ms: int      # dispatch time, integer milliseconds
    seq: int       # global scheduling counter; FIFO tie-break at equal times
    target: str    # encoded actor id the event is dispatched to
    payload: dict


class EventQueue:
    """Min-heap of events keyed by (t_ms, seq). seq rises monotonically, so
    events scheduled at the same millisecond dispatch in scheduling order."""

    def __init__(self):
        self._heap: list[tuple[int, int, SimEvent]] = []
        self._next_seq = 0

    def push(self, t_ms: int, target: str, payload: dict) -> SimEvent:
        ev = SimEvent(t_ms, self._next_seq, target, payload)
        self._next_seq += 1
        heapq.heappush(self._heap, (t_ms, ev.seq, ev))
        return ev

    def pop(self) -> Optional[SimEvent]:
        if not self._heap:
            return None
        return heapq.heappop(self._heap)[2]

    def peek_time(self) -> Optional[int]:
        return self._heap[0][0] if self._heap else None

    def __len__(self) -> int:
        return len(self._heap)


class TraceWriter:
    """Append-only JSON Lines trace.

    Key order is fixed (t_ms, seq, actor, kind, payload) and the seq field is a
    gap-free per-record counter, so two byte-identical traces mean two
    identical runs. Observers see every record as it is emitted.
    """

    def __init__(self, out: Optional[TextIO] = None):
        self._out = out
        self._seq = 0
        self.observers: list[Callable[[dict], None]] = []

    @property
    def next_seq(self) -> int:
        return self._seq

    def emit(self, t_ms: int, actor: str, kind: str, payload: dict) -> dict:
        rec = {"t_ms": t_ms, "seq": self._seq, "actor": actor, "kind": kind, "payload": payload}
        self._seq += 1
        if self._out is not None:
            self._out.write(json.dumps(rec, separators=(",", ":")) + "\n")
        for observer in self.observers:
            observer(rec)
        return rec


class Engine:
    """Single-threaded event loop: pop, advance clock, dispatch, repeat."""

    def __init__(self, trace: Optional[TraceWriter] = None):
        self.clock = 0
        self.queue = EventQueue()
        self.trace = trace if trace is not None else TraceWriter(None)
        self._handlers: dict[str, Callable[[SimEvent], None]] = {}
        self.post_dispatch: list[Callable[[SimEvent], None]] = []
        self.dispatched = 0

    def register(self, actor_key: str, handler: Callable[[SimEvent], None]) -> None:
        self._handlers[actor_key] = handler

    def schedule(self, t_ms: int, target: str, payload: dict) -> SimEvent:
        if t_ms < self.clock:
            raise SchedulingInPastError(f"cannot schedule at {t_ms}ms, clock is {self.clock}ms")
        return self.queue.push(t_ms, target, payload)

    def emit(self, actor: str, kind: str, payload: dict) -> dict:
        return self.trace.emit(self.clock, actor, kind, payload)

    def run_until(self, t_end_ms: int) -> int:
        """Dispatch every event with t_ms <= t_end_ms; clock lands on t_end_ms."""
        while True:
            t_next = self.queue.peek_time()
            if t_next is None or t_next > t_end_ms:
                break
            ev = self.queue.pop()
            self.clock = ev.t_ms
            handler = self._handlers.get(ev.target)
            if handler is None:
                raise RuntimeError(f"event targets unregistered actor {ev.target!r}")
            try:
                handler(ev)
                self.dispatched += 1
                for hook in self.post_dispatch:
                    hook(ev)
            except InvariantViolation as violation:
                self.trace.emit(self.clock, ev.target, "abort",
                                {"invariant": violation.name, "detail": violation.detail})
                raise
        self.clock = t_end_ms
        return self.dispatched
