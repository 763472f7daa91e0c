"""Scripted stand-in pilots for batch experiments.

Three behaviors, each driving the hand input of a closed-loop session:

* waypoint: flies the task waypoints as given; ignores the cues.
* noisy-depth: the same, but every perceived along-sight (X) coordinate is
  shifted by one Gaussian draw per trial, imitating an operator misjudging
  depth.
* haptic-reactive: noisy-depth plus reflexes on the tactile cues: it backs
  away from any direction whose intensity exceeds the reaction threshold,
  and on wall-approach runs it advances on the cue itself, halting when the
  front tactor reports the hold level.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .dynamics import DroneState
from .geometry import InputDomainError, Vec3
from .sensing import DIRECTIONS, Direction, HapticCue
from .world import Aabb, Scenario, Task

WAYPOINT_STANDOFF = 0.8   # m before/after a gate plane
APPROACH_MARGIN = 0.8     # m a cautious depth-guessing pilot keeps from the wall


class PilotKind(str, Enum):
    WAYPOINT = "waypoint"
    NOISY_DEPTH = "noisy_depth"
    HAPTIC_REACTIVE = "haptic_reactive"


@dataclass(frozen=True)
class PilotPolicy:
    kind: PilotKind
    waypoints: tuple[Vec3, ...] | None = None   # None: derive from the task
    speed: float = 1.2                 # m/s command motion toward the waypoint
    capture_radius: float = 0.15       # m, waypoint advance when the drone is this close
    leash: float = 0.6                 # m, max lead of the command over the drone
    arrive_gain: float = 1.5           # 1/s, speed tapers to arrive_gain * remaining distance
    depth_sigma: float = 0.3           # m, std of the per-trial depth bias
    reaction_threshold: float = 0.6    # rho: back off above this intensity
    hold_threshold: float = 0.8        # rho_hold: stop advancing on approach
    backoff_speed: float = 2.5         # m/s at full intensity above rho
    approach_speed: float = 1.0        # m/s cue-driven advance toward the wall
    stall_timeout: float = 3.0         # s without drone motion before retrying a leg
    progress_speed: float = 0.05       # m/s below which the drone counts as stalled
    seed: int = 0

    def __post_init__(self) -> None:
        if self.depth_sigma < 0:
            raise InputDomainError("depth_sigma must be nonnegative")
        if not (0 < self.reaction_threshold <= 1.0 and 0 < self.hold_threshold <= 1.0):
            raise InputDomainError("thresholds must lie in (0, 1]")
        if self.speed <= 0 or self.backoff_speed < 0 or self.approach_speed < 0:
            raise InputDomainError("speeds must be positive")
        if self.leash <= 0 or self.arrive_gain <= 0:
            raise InputDomainError("leash and arrive_gain must be positive")
        if self.stall_timeout <= 0:
            raise InputDomainError("stall_timeout must be positive")


def default_waypoints(scenario: Scenario) -> tuple[Vec3, ...]:
    """Task waypoints: through each gate in order, or up to the target wall."""
    task = scenario.task
    if task is Task.WALL_APPROACH:
        wall = scenario.world.obstacles[scenario.target_wall]
        axis, sign = _approach_axis(scenario, wall)
        face = wall.min[axis] if sign > 0 else wall.max[axis]
        target = scenario.spawn.with_axis(axis, face - sign * APPROACH_MARGIN)
        return (target,)
    waypoints = []
    position = scenario.spawn
    for gate_id in scenario.gate_order:
        gate = scenario.gate_by_id(gate_id)
        center = gate.opening_center()
        sign = 1.0 if center[gate.plane_axis] >= position[gate.plane_axis] else -1.0
        offset = Vec3().with_axis(gate.plane_axis, sign * WAYPOINT_STANDOFF)
        waypoints.append(center - offset)
        waypoints.append(center + offset)
        position = waypoints[-1]
    if not waypoints:
        raise InputDomainError(f"scenario {scenario.name!r} defines no waypoints")
    return tuple(waypoints)


def _approach_axis(scenario: Scenario, wall: Aabb) -> tuple[int, float]:
    delta = wall.center() - scenario.spawn
    axis = max(range(3), key=lambda a: abs(delta[a]))
    return axis, 1.0 if delta[axis] >= 0 else -1.0


def _toward(point: Vec3, target: Vec3, max_step: float) -> Vec3:
    delta = target - point
    dist = delta.norm()
    if dist <= max_step or dist == 0.0:
        return target
    return point + delta * (max_step / dist)


class Pilot:
    """Stateful per-trial controller emitting hand positions each tick.

    The pilot moves a world-space command point and hands back its scaled-down
    image, so with the absolute mapping the goal tracks the command exactly.
    """

    def __init__(
        self,
        policy: PilotPolicy,
        scenario: Scenario,
        trial_seed: int,
        *,
        scale: float,
        dt: float,
    ):
        if policy.waypoints is not None and not policy.waypoints:
            raise InputDomainError("waypoint list must not be empty")
        self.policy = policy
        self.scenario = scenario
        self.dt = dt
        self.inv_scale = 1.0 / scale

        rng = random.Random(trial_seed)
        if policy.kind is PilotKind.WAYPOINT:
            self.depth_bias = 0.0
        else:
            self.depth_bias = rng.gauss(0.0, policy.depth_sigma)

        bias = Vec3(self.depth_bias, 0.0, 0.0)
        base = policy.waypoints if policy.waypoints is not None else default_waypoints(scenario)
        self.waypoints = tuple(wp + bias for wp in base)
        self.wp_index = 0
        self.command = scenario.spawn

        self._stall_ticks = 0
        self._retreat_target: Vec3 | None = None

        self._approach: tuple[int, float, Direction] | None = None
        if policy.kind is PilotKind.HAPTIC_REACTIVE and scenario.task is Task.WALL_APPROACH:
            wall = scenario.world.obstacles[scenario.target_wall]
            axis, sign = _approach_axis(scenario, wall)
            facing = next(d for d in DIRECTIONS if d.axis == axis and d.sign == sign)
            self._approach = (axis, sign, facing)

    def step(self, state: DroneState, cue: HapticCue) -> Vec3:
        """Consume the latest observation, move the command, emit the hand pose."""
        self._advance_waypoint(state)
        self._update_retry(state)
        if self._retreat_target is not None:
            self.command = _toward(
                self.command, self._retreat_target, self.policy.speed * self.dt
            )
            if self.policy.kind is PilotKind.HAPTIC_REACTIVE:
                self.command = self.command + self._backoff(cue)
            return self._leashed(state)
        target = self.waypoints[min(self.wp_index, len(self.waypoints) - 1)]

        if self._approach is not None:
            axis, sign, facing = self._approach
            front = cue.intensity(facing)
            m = cue.max_intensity
            lateral_target = target.with_axis(axis, self.command[axis])
            self.command = _toward(self.command, lateral_target, self._step_size(lateral_target))
            halt = self.policy.hold_threshold * m <= front < m
            if not halt:
                advance = self.policy.approach_speed * self.dt
                self.command = self.command.with_axis(axis, self.command[axis] + sign * advance)
        else:
            self.command = _toward(self.command, target, self._step_size(target))

        if self.policy.kind is PilotKind.HAPTIC_REACTIVE:
            self.command = self.command + self._backoff(cue)

        return self._leashed(state)

    def _leashed(self, state: DroneState) -> Vec3:
        # Keep the command on a leash around the drone: a pilot guides the
        # vehicle rather than running the hand arbitrarily far ahead of it.
        lead = self.command - state.position
        lead_dist = lead.norm()
        if lead_dist > self.policy.leash:
            self.command = state.position + lead * (self.policy.leash / lead_dist)
        return self.command * self.inv_scale

    def _step_size(self, target: Vec3) -> float:
        # taper toward arrival so the drone is not carried past the stop
        speed = min(self.policy.speed, self.policy.arrive_gain * self.command.dist_to(target))
        return speed * self.dt

    def _advance_waypoint(self, state: DroneState) -> None:
        while (
            self.wp_index < len(self.waypoints)
            and state.position.dist_to(self.waypoints[self.wp_index]) <= self.policy.capture_radius
        ):
            self.wp_index += 1

    def _update_retry(self, state: DroneState) -> None:
        """Abandon a leg that stopped making progress and re-fly it.

        A pilot whose drone sits still against something backs off to the
        previous waypoint and tries again; the wall-approach hold of the
        haptic pilot is deliberate hovering and is exempt.
        """
        if state.velocity.norm() > self.policy.progress_speed:
            self._stall_ticks = 0
        else:
            self._stall_ticks += 1

        if self._retreat_target is not None:
            if state.position.dist_to(self._retreat_target) <= self.policy.capture_radius:
                self._retreat_target = None
                self._stall_ticks = 0
            return

        routing = self.wp_index < len(self.waypoints)
        if (
            routing
            and self._approach is None
            and self._stall_ticks * self.dt >= self.policy.stall_timeout
        ):
            if self.wp_index > 0:
                self._retreat_target = self.waypoints[self.wp_index - 1]
            else:
                self._retreat_target = self.scenario.spawn
            self._stall_ticks = 0

    def _backoff(self, cue: HapticCue) -> Vec3:
        rho = self.policy.reaction_threshold * cue.max_intensity
        span = cue.max_intensity - rho
        if span <= 0:
            return Vec3()
        shift = Vec3()
        for direction in DIRECTIONS:
            excess = cue.intensity(direction) - rho
            if excess > 0:
                speed = self.policy.backoff_speed * (excess / span)
                shift = shift - direction.unit() * (speed * self.dt)
        return shift
