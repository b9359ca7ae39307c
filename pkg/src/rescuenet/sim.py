"""Simulation assembly: builds the world, the link fabric and every actor from
a scenario, injects quakes/kills/warnings, advances the evacuation flow, and
exposes the WorldView interface actors sense and act through."""
from __future__ import annotations

from typing import Optional, TextIO

from . import postquake
from .actors import (ALPHA, BETA, CRISIS, POLICE, SATELLITE, SEISMIC, WORLD,
                     Actor, ActorId, CrisisCenter, Ctx, Drone, EdgeServer,
                     FleetEntry, GroundStation, HelicopterAlpha, HelicopterBeta,
                     Police as PoliceActor, RescueTeam, SatelliteNode,
                     SeismicCenter, Sensor)
from .actors.drone import ROLE_COVERAGE, ROLE_GATEWAY, ROLE_NURSING
from .engine import Engine, InvariantViolation, TraceWriter, actor_rng
from .netsim import Link, LinkKind, LinkTable, Network, apply_disruption, make_link_id
from .scenario import Scenario
from .world import (Cell, EarthquakeEvent, RiskLevel, RoadGraph, Station,
                    SurvivorSite, Zone, ZoneMap, block_roads, classify_risk,
                    compute_field, grid_roads, seed_survivors)

TRACE_FORMAT = "rescuenet-trace-1"

WORLD_KEY = WORLD.encode()


class WorldView:
    """What actors may know and touch about the physical world.

    Reads are free; the only sanctioned mutations are survivor scan/rescue
    bookkeeping and posting evacuation advisories.
    """

    def __init__(self, sim: "Simulation"):
        self._sim = sim

    # -- static geometry ----------------------------------------------------

    def cell_xy(self, cell_id: int) -> tuple[float, float]:
        cell = self._sim.zm.cell(cell_id)
        return (float(cell.x), float(cell.y))

    def zone_centroid(self, zone_id: str) -> tuple[float, float]:
        return self._sim.zm.zone_centroid(zone_id)

    def zone_centroid_cell(self, zone_id: str) -> int:
        return self._sim.zm.zone_centroid_cell(zone_id)

    def distance_cells_m(self, a: tuple[float, float], b: tuple[float, float]) -> float:
        return self._sim.zm.distance_m(a, b)

    # -- shaking ------------------------------------------------------------

    def intensity(self, cell_id: int) -> float:
        return self._sim.field.get(cell_id, 0.0)

    # -- survivors ----------------------------------------------------------

    def sites_near(self, cell_id: int) -> list[SurvivorSite]:
        return postquake.sites_in_radius(self._sim.sites, self._sim.zm, cell_id,
                                         self._sim.sc.ap.scan_radius_cells)

    def scan_site(self, site: SurvivorSite, rng) -> int:
        return postquake.scan_site(site, self._sim.sc.ap.detect_q, rng,
                                   self._sim.engine.clock)

    def site_at(self, cell_id: int) -> Optional[SurvivorSite]:
        return self._sim.sites_by_cell.get(cell_id)

    def rescue(self, site: SurvivorSite, freed: int) -> None:
        site.rescued += freed

    # -- roads and evacuation -----------------------------------------------

    def edge_blocked(self, edge_id: str) -> bool:
        return self._sim.roads.edge(edge_id).blocked

    def edge_other_end(self, edge_id: str, cell_id: int) -> int:
        edge = self._sim.roads.edge(edge_id)
        return edge.v if cell_id == edge.u else edge.u

    def plan_route(self, src: int, dst: int) -> Optional[postquake.SafeRoute]:
        return postquake.compute_safe_route(self._sim.roads, src, {dst},
                                            set(self._sim.congested))

    def congested_near(self, cell_id: int) -> list[dict]:
        sim = self._sim
        cx, cy = self.cell_xy(cell_id)
        radius = sim.sc.ap.scan_radius_cells
        out = []
        for edge_id in sim.congested:
            edge = sim.roads.edge(edge_id)
            for end in (edge.u, edge.v):
                ex, ey = self.cell_xy(end)
                if (ex - cx) ** 2 + (ey - cy) ** 2 <= radius * radius:
                    out.append({"edge": edge_id, "load": sim.flow.loads.get(edge_id, 0),
                                "capacity": edge.capacity})
                    break
        return out

    def cells_needing_advisory(self, cell_id: int) -> list[int]:
        """Evacuation groups near the drone that are stuck: no adopted route,
        no fresh advisory waiting, and no greedy step that gets them closer."""
        sim = self._sim
        if not sim.flow.started or not sim.flow.groups:
            return []
        cx, cy = self.cell_xy(cell_id)
        radius = sim.sc.ap.scan_radius_cells
        dist = postquake._distance_to_secure(sim.roads, sim.secure)
        stuck = []
        for group in sim.flow.groups:
            gx, gy = self.cell_xy(group.cell)
            if (gx - cx) ** 2 + (gy - cy) ** 2 > radius * radius:
                continue
            if group.route:
                continue
            adv = sim.flow.advisories.get(group.cell)
            if adv is not None and adv.issued_ms > group.route_stamp and adv.path:
                first = sim.roads.edge(adv.path[0])
                if not first.blocked:
                    continue  # a workable plan is already posted
            here = dist.get(group.cell)
            improving = False
            for edge, other in sim.roads.neighbors(group.cell):
                if edge.blocked:
                    continue
                d = dist.get(other)
                if d is not None and (here is None or d < here):
                    improving = True
                    break
            if not improving:
                stuck.append(group.cell)
        return sorted(set(stuck))

    def plan_evacuation(self, cell_id: int) -> Optional[postquake.SafeRoute]:
        sim = self._sim
        return postquake.compute_safe_route(sim.roads, cell_id, sim.secure,
                                            set(sim.congested))

    def post_advisory(self, cell_id: int, plan: postquake.SafeRoute) -> None:
        self._sim.flow.post_advisory(
            postquake.Advisory(cell_id, plan.destination, plan.path,
                               self._sim.engine.clock))


class Simulation:
    """One fully wired run. Build it, then call run()."""

    def __init__(self, sc: Scenario, trace_out: Optional[TextIO] = None,
                 seed: Optional[int] = None, t_end_ms: Optional[int] = None,
                 check_invariants: bool = False):
        if seed is not None:
            sc.run.seed = seed
        if t_end_ms is not None:
            sc.run.t_end_ms = t_end_ms
        self.sc = sc
        self.zm = _build_zone_map(sc)
        self.roads = grid_roads(self.zm, sc.road_capacity)
        self.field: dict[int, float] = {}
        self.sites: list[SurvivorSite] = []
        self.sites_by_cell: dict[int, SurvivorSite] = {}
        self.secure: set[int] = set()
        self.congested: list[str] = []
        self.flow = postquake.PopulationFlow()
        self.trapped_total = 0

        self.trace = TraceWriter(trace_out)
        self.engine = Engine(self.trace)
        self.actors: dict[str, Actor] = {}
        self._build_actors()
        self.links = _build_link_table(sc, self.zm, self.actors)
        self.network = Network(self.engine, self.links)
        self.worldview = WorldView(self)
        self._streams = {key: actor_rng(sc.run.seed, key) for key in self.actors}
        self._rng_survivors = actor_rng(sc.run.seed, WORLD_KEY + "#survivors")
        self._rng_links = actor_rng(sc.run.seed, WORLD_KEY + "#links")
        self._rng_roads = actor_rng(sc.run.seed, WORLD_KEY + "#roads")

        for key in self.actors:
            self.engine.register(key, self._make_handler(self.actors[key]))
        self.engine.register(WORLD_KEY, self._world_event)

        self.checker = InvariantChecker(self) if check_invariants else None
        if self.checker is not None:
            self.trace.observers.append(self.checker.on_record)
            self.engine.post_dispatch.append(self.checker.after_dispatch)

        self.engine.emit(WORLD_KEY, "header",
                         {"format": TRACE_FORMAT, "seed": sc.run.seed,
                          "t_end_ms": sc.run.t_end_ms, "scenario": sc.canonical_text()})
        for key in self.actors:  # build order; deterministic
            self.actors[key].on_start(self._ctx(self.actors[key]))
        self._schedule_inputs()

    # -- construction -------------------------------------------------------

    def _build_actors(self) -> None:
        sc = self.sc
        add = self._add_actor
        cell_id = lambda x, y: y * sc.width + x

        station_cells = {st.station_id: cell_id(st.x, st.y) for st in sc.stations}
        drone_keys = {d.index: ActorId("Drone", d.index).encode()
                      for d in sc.drones}
        nurse_spec = next(d for d in sc.drones if d.kind == "nurse")
        nurse_key = drone_keys[nurse_spec.index]
        alpha_key, beta_key = ALPHA.encode(), BETA.encode()
        gs_keys = [ActorId("GroundStation", g.index).encode()
                   for g in sorted(sc.ground_stations, key=lambda g: g.index)]
        team_keys = [ActorId("RescueTeam", t.index).encode()
                     for t in sorted(sc.teams, key=lambda t: t.index)]

        zone_by_id = {z.zone_id: z for z in self.zm.zones}
        for s in sorted(sc.sensors, key=lambda s: s.index):
            zone = zone_by_id[self.zm.zone_of_cell(cell_id(s.x, s.y))]
            paired = drone_keys[s.pair] if s.pair is not None else None
            add(Sensor(ActorId("Sensor", s.index), cell_id(s.x, s.y),
                       theta=zone.theta, noise_sigma=zone.noise_sigma,
                       edge_server=ActorId("EdgeServer", s.edge).encode(),
                       paired_drone=paired))
        for e in sorted(sc.edge_servers, key=lambda e: e.index):
            add(EdgeServer(ActorId("EdgeServer", e.index), cell_id(e.x, e.y),
                           alpha=alpha_key, ground_stations=gs_keys,
                           k=sc.ap.edge_k, window_ms=sc.ap.edge_window_ms))

        role_map = {"coverage": ROLE_COVERAGE, "spare": ROLE_COVERAGE,
                    "nurse": ROLE_NURSING, "gateway": ROLE_GATEWAY}
        for d in sorted(sc.drones, key=lambda d: d.index):
            drone = Drone(ActorId("Drone", d.index), role_map[d.kind],
                          station_cells[d.station], d.zone,
                          alpha=alpha_key, beta=beta_key, nurse=nurse_key,
                          speed_mps=sc.ap.drone_speed_mps, h_ms=sc.ap.h_ms,
                          miss_limit=sc.ap.miss_limit,
                          scan_period_ms=sc.ap.scan_period_ms,
                          hazard_rate=sc.faults.hazard_rate)
            add(drone)
        nurse_drone = self.actors[nurse_key]
        nurse_drone.install_nurse(self._fleet_snapshot())

        add(HelicopterAlpha(ALPHA, crisis=CRISIS.encode(), beta=beta_key,
                            nurse=nurse_key, fleet=self._fleet_snapshot(),
                            beta_zones=sc.beta_zones, h_ms=sc.ap.h_ms,
                            miss_limit=sc.ap.miss_limit))
        add(HelicopterBeta(BETA, alpha=alpha_key, h_ms=sc.ap.h_ms,
                           miss_limit=sc.ap.miss_limit))
        add(SatelliteNode(SATELLITE))
        for g in sorted(sc.ground_stations, key=lambda g: g.index):
            add(GroundStation(ActorId("GroundStation", g.index)))
        add(PoliceActor(POLICE))
        add(SeismicCenter(SEISMIC, drones=sorted(drone_keys.values())))
        add(CrisisCenter(CRISIS, teams=team_keys, police=POLICE.encode(),
                         ground_stations=gs_keys,
                         red_threshold=sc.ap.red_threshold,
                         collapse_midpoint=sc.wp.collapse_midpoint,
                         collapse_scale=sc.wp.collapse_scale))
        for t in sorted(sc.teams, key=lambda t: t.index):
            add(RescueTeam(ActorId("RescueTeam", t.index), cell_id(t.x, t.y),
                           crisis=CRISIS.encode(), rescue_rate=sc.ap.rescue_rate,
                           move_tick_ms=sc.ap.move_tick_ms))

    def _add_actor(self, actor: Actor) -> None:
        self.actors[actor.key] = actor

    def _fleet_snapshot(self) -> dict[str, FleetEntry]:
        """Fresh FleetEntry objects per coordinator; views must not alias."""
        sc = self.sc
        station_cells = {st.station_id: st.y * sc.width + st.x for st in sc.stations}
        role_map = {"coverage": ROLE_COVERAGE, "spare": ROLE_COVERAGE,
                    "nurse": ROLE_NURSING, "gateway": ROLE_GATEWAY}
        fleet = {}
        for d in sorted(sc.drones, key=lambda d: d.index):
            key = ActorId("Drone", d.index).encode()
            status = "onstation" if d.kind == "gateway" else "docked"
            fleet[key] = FleetEntry(key=key, index=d.index, role=role_map[d.kind],
                                    station_cell=station_cells[d.station],
                                    zone=d.zone, status=status)
        return fleet

    # -- dispatch plumbing --------------------------------------------------

    def _ctx(self, actor: Actor) -> Ctx:
        key = actor.key
        return Ctx(
            now=self.engine.clock,
            rng=self._streams[key],
            world=self.worldview,
            send=lambda dst, msg_kind, body, mode="any", msg_id=None:
                self.network.send(key, dst, msg_kind, body, mode, msg_id),
            schedule=lambda dt_ms, payload:
                self.engine.schedule(self.engine.clock + dt_ms, key, payload),
            trace=lambda kind, payload: self.engine.emit(key, kind, payload),
            new_msg_id=self.network.next_msg_id,
        )

    def _make_handler(self, actor: Actor):
        def handler(ev):
            payload = ev.payload
            if payload.get("ev") == "deliver":
                payload = self.network.accept(payload)
                if payload is None:
                    return
            if actor.failed:
                return  # dead hardware: deliveries land, nothing reacts
            actor.handle(self._ctx(actor), payload)
        return handler

    def _schedule_inputs(self) -> None:
        sc = self.sc
        q = sc.quake
        if q.magnitude > 0 or q.t_ms > 0:
            self.engine.schedule(q.t_ms, WORLD_KEY,
                                 {"ev": "cmd", "name": "quake",
                                  "x": q.x, "y": q.y, "magnitude": q.magnitude,
                                  "aftershock": False})
        if q.early_warning_lead_ms > 0:
            self.engine.schedule(q.t_ms - q.early_warning_lead_ms, SEISMIC.encode(),
                                 {"ev": "cmd", "name": "early_warning",
                                  "lead_ms": q.early_warning_lead_ms})
        for shock in sorted(q.aftershocks, key=lambda a: a.t_ms):
            self.engine.schedule(shock.t_ms, WORLD_KEY,
                                 {"ev": "cmd", "name": "quake",
                                  "x": shock.x, "y": shock.y,
                                  "magnitude": shock.magnitude, "aftershock": True})
        for kill in sorted(sc.faults.kills, key=lambda k: (k.t_ms, k.drone)):
            self.engine.schedule(kill.t_ms, ActorId("Drone", kill.drone).encode(),
                                 {"ev": "cmd", "name": "kill"})

    # -- world events ---------------------------------------------------------

    def _world_event(self, ev) -> None:
        name = ev.payload.get("name")
        if name == "quake":
            self._on_quake(ev.payload)
        elif name == "flow_tick":
            self._on_flow_tick()
        else:
            raise RuntimeError(f"unknown world command {name!r}")

    def _on_quake(self, payload: dict) -> None:
        sc = self.sc
        quake = EarthquakeEvent((payload["x"], payload["y"]),
                                payload["magnitude"], self.engine.clock)
        shock_field = compute_field(self.zm, quake, sc.wp.lambda_m)
        # Damage accumulates: a cell keeps the worst shaking it has seen.
        self.field = {cid: max(self.field.get(cid, 0.0), val)
                      for cid, val in shock_field.items()}
        aftershock = payload["aftershock"]
        if not aftershock:
            self.sites = seed_survivors(self.zm, shock_field, sc.wp.trap_rate,
                                        self._rng_survivors,
                                        sc.wp.collapse_midpoint, sc.wp.collapse_scale)
            self.sites_by_cell = {s.cell_id: s for s in self.sites}
            self.trapped_total = sum(s.total for s in self.sites)
        self.engine.emit(WORLD_KEY, "quake",
                         {"epicenter": [quake.epicenter[0], quake.epicenter[1]],
                          "magnitude": quake.magnitude, "aftershock": aftershock,
                          "sites": [{"cell": s.cell_id, "trapped": s.total}
                                    for s in self.sites] if not aftershock else [],
                          "trapped_total": self.trapped_total})

        multipliers = self._link_multipliers()
        force = self._forced_down_links() if not aftershock else set()
        for link in apply_disruption(self.links, shock_field, self._rng_links,
                                     sc.ap.beta_d, multipliers, force):
            self.engine.emit(WORLD_KEY, "link_down",
                             {"link": link.link_id, "kind": link.kind.value})
        for edge in block_roads(self.roads, shock_field, sc.wp.block_factor,
                                self._rng_roads, sc.wp.collapse_midpoint,
                                sc.wp.collapse_scale):
            self.engine.emit(WORLD_KEY, "road_blocked",
                             {"edge": edge.edge_id, "u": edge.u, "v": edge.v})
        self.secure = postquake.designate_secure_areas(
            self.zm, self.field, set(), sc.wp.safe_intensity)

        if not aftershock:
            trapped = {s.cell_id: s.total for s in self.sites}
            for cell, count in self.flow.start(self.zm, self.secure, trapped):
                self.engine.emit(WORLD_KEY, "sheltered",
                                 {"cell": cell, "count": count,
                                  "fleeing_left": self.flow.fleeing()})
            if self.flow.groups:
                self.engine.schedule(self.engine.clock + sc.ap.flow_tick_ms,
                                     WORLD_KEY, {"ev": "cmd", "name": "flow_tick"})
        # Each shock triggers a fresh sampling burst and station-level launches.
        for s in sorted(sc.sensors, key=lambda s: s.index):
            key = ActorId("Sensor", s.index).encode()
            for i in range(1, sc.ap.sample_count + 1):
                self.engine.schedule(self.engine.clock + i * sc.ap.sample_period_ms,
                                     key, {"ev": "timer", "name": "sample"})
        for d in sorted(sc.drones, key=lambda d: d.index):
            key = ActorId("Drone", d.index).encode()
            station_cell = self.actors[key].station_cell
            if self.field.get(station_cell, 0.0) >= sc.ap.sense_threshold:
                self.engine.schedule(self.engine.clock, key,
                                     {"ev": "cmd", "name": "local_quake"})

    def _link_multipliers(self) -> dict[str, float]:
        """Medium-risk-zone sensor uplinks are partially shielded equipment."""
        sc = self.sc
        out = {}
        if sc.ap.m_down_multiplier == 1.0:
            return out
        for s in sc.sensors:
            zone_id = self.zm.zone_of_cell(s.y * sc.width + s.x)
            zone = next(z for z in self.zm.zones if z.zone_id == zone_id)
            if zone.risk is RiskLevel.MEDIUM:
                sensor_key = ActorId("Sensor", s.index).encode()
                edge_key = ActorId("EdgeServer", s.edge).encode()
                link_id = make_link_id(LinkKind.WIRELESS, sensor_key, edge_key)
                out[link_id] = sc.ap.m_down_multiplier
        return out

    def _forced_down_links(self) -> set[str]:
        if self.sc.faults.force_down == "wireless_all":
            return {l.link_id for l in self.links.links
                    if l.kind is LinkKind.WIRELESS}
        return set()

    def _on_flow_tick(self) -> None:
        sc = self.sc
        congested = postquake.congested_edges(self.roads, self.flow.loads)
        congested_cells = set()
        for edge_id in congested:
            edge = self.roads.edge(edge_id)
            congested_cells.update((edge.u, edge.v))
        self.congested = congested
        self.secure = postquake.designate_secure_areas(
            self.zm, self.field, congested_cells, sc.wp.safe_intensity)
        for cell, count in self.flow.step(self.roads, self.secure):
            self.engine.emit(WORLD_KEY, "sheltered",
                             {"cell": cell, "count": count,
                              "fleeing_left": self.flow.fleeing()})
        if self.flow.groups:
            self.engine.schedule(self.engine.clock + sc.ap.flow_tick_ms,
                                 WORLD_KEY, {"ev": "cmd", "name": "flow_tick"})

    # -- execution ------------------------------------------------------------

    def run(self) -> int:
        return self.engine.run_until(self.sc.run.t_end_ms)


def run_simulation(sc: Scenario, trace_out: Optional[TextIO] = None,
                   seed: Optional[int] = None, t_end_ms: Optional[int] = None,
                   check_invariants: bool = False) -> Simulation:
    sim = Simulation(sc, trace_out, seed, t_end_ms, check_invariants)
    sim.run()
    return sim


# -- world construction -----------------------------------------------------

def _build_zone_map(sc: Scenario) -> ZoneMap:
    cells = []
    for spec in sc.all_cells():
        cells.append(Cell(cell_id=spec.y * sc.width + spec.x, x=spec.x, y=spec.y,
                          fault_strength=spec.fault, population=spec.pop,
                          open_space=spec.open_space,
                          predefined_secure=spec.secure,
                          risk=classify_risk(spec.fault, sc.wp.risk_high,
                                             sc.wp.risk_medium)))
    noise_by_risk = {"H": sc.ap.noise_h, "M": sc.ap.noise_m, "L": sc.ap.noise_l}
    zones = []
    for z in sc.zones:
        cell_ids = tuple(sorted(y * sc.width + x for x, y in z.cells))
        theta = z.theta if z.theta is not None else sc.ap.theta
        noise = z.noise if z.noise is not None else noise_by_risk[z.risk]
        zones.append(Zone(zone_id=z.zone_id, cell_ids=cell_ids,
                          risk=RiskLevel.from_code(z.risk),
                          theta=theta, noise_sigma=noise))
    stations = [Station(st.station_id, st.y * sc.width + st.x) for st in sc.stations]
    return ZoneMap(sc.width, sc.height, sc.wp.cell_size_m, cells, zones, stations)


def _build_link_table(sc: Scenario, zm: ZoneMap, actors: dict[str, Actor]) -> LinkTable:
    """The communication fabric.

    Wireless: sensor-to-edge uplinks, edge servers to the command helicopter
    and ground stations, a full drone mesh (every drone pair, plus both
    helicopters), gateway drones bridging to ground stations / police / rescue
    teams, and the fixed command net (helicopters, crisis, seismic, police,
    teams, ground stations). Hardened point-to-point: each High-risk-zone
    sensor to its paired drone. Satellite legs: every satellite-capable actor.
    """
    ap = sc.ap
    cell_id = lambda x, y: y * sc.width + x
    links: list[Link] = []
    seen: set[str] = set()

    def wireless(a: str, b: str) -> None:
        lid = make_link_id(LinkKind.WIRELESS, a, b)
        if lid not in seen:
            seen.add(lid)
            x, y = sorted((a, b))
            links.append(Link(lid, x, y, LinkKind.WIRELESS, ap.lat_wireless_ms))

    def p2p(a: str, b: str, hardened: bool) -> None:
        lid = make_link_id(LinkKind.POINT_TO_POINT, a, b)
        if lid not in seen:
            seen.add(lid)
            x, y = sorted((a, b))
            links.append(Link(lid, x, y, LinkKind.POINT_TO_POINT, ap.lat_p2p_ms,
                              hardened=hardened))

    alpha, beta = ALPHA.encode(), BETA.encode()
    crisis, police, seismic = CRISIS.encode(), POLICE.encode(), SEISMIC.encode()
    satellite = SATELLITE.encode()
    drone_keys = sorted(ActorId("Drone", d.index).encode() for d in sc.drones)
    gateway_keys = sorted(ActorId("Drone", d.index).encode()
                          for d in sc.drones if d.kind == "gateway")
    gs_keys = sorted(ActorId("GroundStation", g.index).encode()
                     for g in sc.ground_stations)
    team_keys = sorted(ActorId("RescueTeam", t.index).encode() for t in sc.teams)
    edge_keys = sorted(ActorId("EdgeServer", e.index).encode()
                       for e in sc.edge_servers)

    for s in sorted(sc.sensors, key=lambda s: s.index):
        sensor_key = ActorId("Sensor", s.index).encode()
        wireless(sensor_key, ActorId("EdgeServer", s.edge).encode())
        if s.pair is not None:
            p2p(sensor_key, ActorId("Drone", s.pair).encode(), hardened=True)
    for ek in edge_keys:
        wireless(ek, alpha)
        for gk in gs_keys:
            wireless(ek, gk)
    for i, a in enumerate(drone_keys):
        for b in drone_keys[i + 1:]:
            wireless(a, b)
        wireless(a, alpha)
        wireless(a, beta)
    for gk in gateway_keys:
        for other in gs_keys + [police] + team_keys:
            wireless(gk, other)
    wireless(alpha, beta)
    wireless(alpha, crisis)
    wireless(seismic, alpha)
    wireless(seismic, crisis)
    wireless(crisis, police)
    for tk in team_keys:
        wireless(crisis, tk)
    for gk in gs_keys:
        wireless(crisis, gk)

    sat_capable = set(drone_keys) | set(gs_keys) | {alpha, beta, crisis, seismic,
                                                    satellite}
    for node in sorted(sat_capable - {satellite}):
        lid = make_link_id(LinkKind.SATELLITE, node, satellite)
        x, y = sorted((node, satellite))
        links.append(Link(lid, x, y, LinkKind.SATELLITE, ap.lat_satellite_ms))

    actor_cells: dict[str, int] = {}
    for s in sc.sensors:
        actor_cells[ActorId("Sensor", s.index).encode()] = cell_id(s.x, s.y)
    for e in sc.edge_servers:
        actor_cells[ActorId("EdgeServer", e.index).encode()] = cell_id(e.x, e.y)
    station_cells = {st.station_id: cell_id(st.x, st.y) for st in sc.stations}
    for d in sc.drones:
        actor_cells[ActorId("Drone", d.index).encode()] = station_cells[d.station]
    for g in sc.ground_stations:
        actor_cells[ActorId("GroundStation", g.index).encode()] = cell_id(g.x, g.y)
    for t in sc.teams:
        actor_cells[ActorId("RescueTeam", t.index).encode()] = cell_id(t.x, t.y)
    actor_cells[alpha] = cell_id(*sc.alpha_cell)
    actor_cells[beta] = cell_id(*sc.beta_cell)
    actor_cells[crisis] = cell_id(*sc.crisis_cell)
    actor_cells[police] = cell_id(*sc.police_cell)
    actor_cells[seismic] = cell_id(*sc.seismic_cell)

    return LinkTable(links=links, satellite_capable=frozenset(sat_capable),
                     actor_cells=actor_cells, satellite=satellite)


# -- runtime invariants -------------------------------------------------------

# Records a failed actor may still legitimately appear in.
_DEAD_OK_KINDS = frozenset({"fail", "msg_deliver", "msg_dedup", "abort"})


class InvariantChecker:
    """Opt-in runtime safety monitor; raises InvariantViolation on the spot."""

    def __init__(self, sim: Simulation):
        self.sim = sim
        self._failed: set[str] = set()
        self._last_t = 0
        self._next_seq = 0

    def on_record(self, rec: dict) -> None:
        kind = rec["kind"]
        if kind == "abort":
            return
        t, seq, actor = rec["t_ms"], rec["seq"], rec["actor"]
        if seq != self._next_seq:
            raise InvariantViolation("trace_seq_gap", t,
                                     f"expected seq {self._next_seq}, got {seq}")
        self._next_seq += 1
        if t < self._last_t:
            raise InvariantViolation("trace_time_regression", t,
                                     f"record at {t}ms after {self._last_t}ms")
        self._last_t = t
        if actor in self._failed and kind not in _DEAD_OK_KINDS:
            raise InvariantViolation("dead_actor_silence", t,
                                     f"{actor} emitted '{kind}' after failing")
        if kind == "fail":
            self._failed.add(actor)
        elif kind == "advisory" and actor != ALPHA.encode():
            self._check_advisory(rec)

    def _check_advisory(self, rec: dict) -> None:
        sim, p = self.sim, rec["payload"]
        node = p["origin"]
        for edge_id in p["path"]:
            edge = sim.roads.edge(edge_id)
            if edge.blocked:
                raise InvariantViolation("advisory_safety", rec["t_ms"],
                                         f"advisory for cell {p['origin']} uses blocked {edge_id}")
            if node not in (edge.u, edge.v):
                raise InvariantViolation("advisory_safety", rec["t_ms"],
                                         f"advisory path disconnected at {edge_id}")
            node = edge.v if node == edge.u else edge.u
        if node != p["destination"]:
            raise InvariantViolation("advisory_safety", rec["t_ms"],
                                     "advisory path misses its destination")
        if p["destination"] not in sim.secure:
            raise InvariantViolation("advisory_safety", rec["t_ms"],
                                     f"advisory destination {p['destination']} not secure")

    def after_dispatch(self, ev) -> None:
        sim = self.sim
        now = sim.engine.clock
        total = 0
        for site in sim.sites:
            if not 0 <= site.rescued <= site.detected <= site.total:
                raise InvariantViolation(
                    "survivor_conservation", now,
                    f"cell {site.cell_id}: rescued {site.rescued} / detected "
                    f"{site.detected} / total {site.total}")
            total += site.total
        if total != sim.trapped_total:
            raise InvariantViolation("survivor_conservation", now,
                                     f"site totals changed: {total} != {sim.trapped_total}")
        if sim.flow.started:
            moving = sim.flow.fleeing()
            if moving + sim.flow.sheltered != sim.flow.initial_fleeing:
                raise InvariantViolation(
                    "population_conservation", now,
                    f"fleeing {moving} + sheltered {sim.flow.sheltered} != "
                    f"initial {sim.flow.initial_fleeing}")
        nurses = 0
        for actor in sim.actors.values():
            if actor.failed:
                continue
            if getattr(actor, "nurse_role", None) is not None:
                nurses += 1
        if nurses > 1:
            raise InvariantViolation("single_nurse", now,
                                     f"{nurses} live actors hold the nursing role")
