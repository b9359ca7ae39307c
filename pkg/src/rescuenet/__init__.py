"""rescuenet: a deterministic discrete-event simulator of a drone-based
earthquake response network: sensing, auto-deployment, heartbeat failover,
satellite-backed messaging, and post-quake ground procedures."""

__version__ = "0.1.0"

from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario_text
from .sim import Simulation, run_simulation

__all__ = [
    "Scenario", "ScenarioError", "Simulation", "__version__",
    "load_scenario", "parse_scenario_text", "run_simulation",
]
