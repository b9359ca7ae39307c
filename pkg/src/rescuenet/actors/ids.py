"""Stable actor identities. The encoded form doubles as the RNG stream key."""
from __future__ import annotations

from dataclasses import dataclass

CLASS_TAGS = frozenset({
    "Sensor", "EdgeServer", "Drone", "HelicopterAlpha", "HelicopterBeta",
    "Satellite", "GroundStation", "SeismicCenter", "CrisisCenter", "Police",
    "RescueTeam",
    # Pseudo-actor for world-level trace records (quake, road damage, flow).
    "World",
})


@dataclass(frozen=True, order=True)
class ActorId:
    tag: str
    index: int

    def __post_init__(self):
        if self.tag not in CLASS_TAGS:
            raise ValueError(f"unknown actor class {self.tag!r}")
        if self.index < 0:
            raise ValueError(f"actor index must be non-negative, got {self.index}")

    def encode(self) -> str:
        return f"{self.tag}:{self.index}"

    @classmethod
    def parse(cls, text: str) -> "ActorId":
        tag, _, index = text.partition(":")
        if not index or not index.isdigit():
            raise ValueError(f"malformed actor id {text!r}")
        return cls(tag, int(index))


WORLD = ActorId("World", 0)
ALPHA = ActorId("HelicopterAlpha", 0)
BETA = ActorId("HelicopterBeta", 0)
SATELLITE = ActorId("Satellite", 0)
CRISIS = ActorId("CrisisCenter", 0)
SEISMIC = ActorId("SeismicCenter", 0)
POLICE = ActorId("Police", 0)
