"""Hand-motion drone teleoperation simulator with vibrotactile proximity cues.

Deterministic point-mass simulation, six-axis range sensing rendered as
tactile intensities, scripted-pilot experiments with nonparametric statistics,
and a WebSocket gateway for flying the simulated drone live from a browser.
"""

__version__ = "0.1.0"

from .geometry import Aabb, InputDomainError, Vec3
from .world import (
    DRONE_RADIUS,
    Gate,
    Scenario,
    ScenarioError,
    Task,
    World,
    build_scenario,
    collision_check,
    gate_crossing_check,
    load_scenario_file,
    load_scenario_json,
    scenario_to_json,
)

__all__ = [
    "Aabb",
    "DRONE_RADIUS",
    "Gate",
    "InputDomainError",
    "Scenario",
    "ScenarioError",
    "Task",
    "Vec3",
    "World",
    "build_scenario",
    "collision_check",
    "gate_crossing_check",
    "load_scenario_file",
    "load_scenario_json",
    "scenario_to_json",
]
