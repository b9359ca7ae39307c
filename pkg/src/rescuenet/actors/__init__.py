"""Actor state machines for the rescue network."""
from .base import Actor, Ctx
from .crisis import CrisisCenter
from .drone import (Drone, FleetEntry, NurseRole, ROLE_COVERAGE, ROLE_GATEWAY,
                    ROLE_NURSING, SpareCandidate, choose_spare)
from .edge_server import EdgeServer
from .helicopter import FORWARDED_KINDS, HelicopterAlpha, HelicopterBeta
from .ids import (ALPHA, BETA, CRISIS, POLICE, SATELLITE, SEISMIC, WORLD,
                  ActorId)
from .rescue import RescueTeam
from .sensor import Sensor
from .sinks import GroundStation, Police, SatelliteNode, SeismicCenter

__all__ = [
    "ALPHA", "Actor", "ActorId", "BETA", "CRISIS", "Ctx", "CrisisCenter",
    "Drone", "EdgeServer", "FORWARDED_KINDS", "FleetEntry", "GroundStation",
    "HelicopterAlpha", "HelicopterBeta", "NurseRole", "POLICE", "Police",
    "RescueTeam", "ROLE_COVERAGE", "ROLE_GATEWAY", "ROLE_NURSING", "SATELLITE",
    "SEISMIC", "SatelliteNode", "SeismicCenter", "Sensor", "SpareCandidate",
    "WORLD", "choose_spare",
]
