"""Crisis center: alarm escalation under the two-source rule and priority
dispatch of ground rescue teams."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..postquake import priority_score
from ..world import SurvivorSite
from .base import Actor, Ctx
from .ids import ActorId

DEFAULT_RED_THRESHOLD = 4.0


@dataclass
class SitePicture:
    """What the crisis center believes about one survivor site."""
    cell_id: int
    detected: int = 0
    rescued: int = 0
    first_detected_ms: Optional[int] = None
    intensity: float = 0.0


class CrisisCenter(Actor):
    def __init__(self, actor_id: ActorId, teams: list[str], police: str,
                 ground_stations: list[str],
                 red_threshold: float = DEFAULT_RED_THRESHOLD,
                 collapse_midpoint: float = 5.0, collapse_scale: float = 0.8):
        super().__init__(actor_id)
        self.teams = sorted(teams)
        self.police = police
        self.ground_stations = list(ground_stations)
        self.red_threshold = red_threshold
        self.collapse_midpoint = collapse_midpoint
        self.collapse_scale = collapse_scale
        self.alarm = "green"
        self.confirmations: dict[str, float] = {}   # source actor -> intensity
        self.sites: dict[int, SitePicture] = {}
        self.assignments: dict[str, int] = {}       # team -> cell
        self.idle: set[str] = set(self.teams)
        self.blocked: set[str] = set()

    def on_message(self, ctx: Ctx, src: str, msg_kind: str, body: dict) -> None:
        if msg_kind == "edge_report":
            if self.alarm == "green":
                self.alarm = "yellow"
                ctx.trace("yellow", {"source": body["source"]})
            self._confirm(body["source"], body["estimate"])
        elif msg_kind == "coverage_up":
            self._confirm(body["drone"], body["intensity"])
        elif msg_kind == "scan_report":
            for entry in body["sites"]:
                pic = self.sites.setdefault(entry["cell"], SitePicture(entry["cell"]))
                pic.detected += entry["newly"]
                pic.intensity = entry["intensity"]
                if pic.first_detected_ms is None:
                    pic.first_detected_ms = ctx.now
        elif msg_kind == "advisory":
            for team in sorted(self.blocked):
                ctx.send(team, "replan", {})
            self.blocked.clear()
        elif msg_kind == "team_blocked":
            self.blocked.add(src)
        elif msg_kind == "team_complete":
            pic = self.sites.setdefault(body["cell"], SitePicture(body["cell"]))
            pic.rescued = max(pic.rescued, body["rescued_total"])
            if pic.detected < pic.rescued:
                pic.detected = pic.rescued
            self.assignments.pop(src, None)
            self.blocked.discard(src)
            self.idle.add(src)
        self._escalate(ctx)
        if self.alarm == "red":
            self._dispatch(ctx)

    def _confirm(self, source: str, intensity: float) -> None:
        if intensity >= self.red_threshold:
            self.confirmations[source] = intensity

    def _escalate(self, ctx: Ctx) -> None:
        if self.alarm == "yellow" and len(self.confirmations) >= 2:
            self.alarm = "red"
            ctx.trace("red", {"sources": sorted(self.confirmations)})
            self._notify(ctx, {"subject": "red", "sources": sorted(self.confirmations)})

    def _dispatch(self, ctx: Ctx) -> None:
        """Hand every idle team the most urgent uncovered site."""
        while self.idle:
            covered = set(self.assignments.values())
            ranked = self._ranked_sites(covered)
            if not ranked:
                break
            team = min(self.idle)
            cell = ranked[0]
            self.idle.remove(team)
            self.assignments[team] = cell
            pic = self.sites[cell]
            score = priority_score(
                SurvivorSite(cell, pic.detected, pic.detected, pic.rescued,
                             pic.first_detected_ms),
                pic.intensity, self.collapse_midpoint, self.collapse_scale)
            ctx.trace("dispatch", {"team": team, "cell": cell, "score": score})
            ctx.send(team, "dispatch", {"cell": cell})
            self._notify(ctx, {"subject": "dispatch", "team": team, "cell": cell})

    def _ranked_sites(self, covered: set[int]) -> list[int]:
        entries = []
        for cell, pic in sorted(self.sites.items()):
            if cell in covered or pic.detected - pic.rescued <= 0:
                continue
            site = SurvivorSite(cell, pic.detected, pic.detected, pic.rescued,
                                pic.first_detected_ms)
            score = priority_score(site, pic.intensity,
                                   self.collapse_midpoint, self.collapse_scale)
            first = pic.first_detected_ms if pic.first_detected_ms is not None else 0
            entries.append(((-score, first, cell), cell))
        return [cell for _, cell in sorted(entries)]

    def _notify(self, ctx: Ctx, body: dict) -> None:
        ctx.send(self.police, "notify", body)
        for gs in self.ground_stations:
            ctx.send(gs, "notify", body)
