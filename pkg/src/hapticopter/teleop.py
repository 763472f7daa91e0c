"""Hand-pose to goal-setpoint mapping with scaling and a clutch.

The operator's tracked hand position, streamed at the tick rate, becomes the
PID goal through a pure scale (absolute mode) or an anchored offset (relative
mode). While the clutch is disengaged the hand moves freely without affecting
the drone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple

from .geometry import Aabb, InputDomainError, Vec3, require_finite
from .world import DRONE_RADIUS, Scenario

SIM_SCALE = 8.0       # arm reach to room size, simulation experiments
HARDWARE_SCALE = 6.0  # reduced on the physical platform to avoid instability

GOAL_CLEARANCE = 2.0 * DRONE_RADIUS  # goal keeps this far inside the room

STALE_AFTER = 0.25  # s without fresh input before the stream counts as stale


class HandPose(NamedTuple):
    position: Vec3
    timestamp: float


class ClutchMode(str, Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


@dataclass(frozen=True)
class ClutchState:
    engaged: bool = False
    anchor_hand: Vec3 = Vec3()
    anchor_goal: Vec3 = Vec3()
    mode: ClutchMode = ClutchMode.ABSOLUTE


@dataclass(frozen=True)
class MappingConfig:
    scale: float = SIM_SCALE
    mode: ClutchMode = ClutchMode.ABSOLUTE
    workspace: Aabb | None = None     # operator reach box, informational
    goal_bounds: Aabb | None = None   # room shrunk by clearance; None = unclamped

    def __post_init__(self) -> None:
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise InputDomainError(f"scale must be positive, got {self.scale}")

    @classmethod
    def simulation(cls, room: Aabb | None = None, mode: ClutchMode = ClutchMode.ABSOLUTE) -> "MappingConfig":
        return cls._preset(SIM_SCALE, room, mode)

    @classmethod
    def hardware(cls, room: Aabb | None = None, mode: ClutchMode = ClutchMode.ABSOLUTE) -> "MappingConfig":
        return cls._preset(HARDWARE_SCALE, room, mode)

    @classmethod
    def _preset(cls, scale: float, room: Aabb | None, mode: ClutchMode) -> "MappingConfig":
        if room is None:
            return cls(scale=scale, mode=mode)
        bounds = Aabb(
            room.min + Vec3(GOAL_CLEARANCE, GOAL_CLEARANCE, GOAL_CLEARANCE),
            room.max - Vec3(GOAL_CLEARANCE, GOAL_CLEARANCE, GOAL_CLEARANCE),
        )
        inv = 1.0 / scale
        workspace = Aabb(bounds.min * inv, bounds.max * inv)
        return cls(scale=scale, mode=mode, workspace=workspace, goal_bounds=bounds)


def map_hand_to_goal(
    hand: HandPose, clutch: ClutchState, config: MappingConfig, current_goal: Vec3
) -> Vec3:
    """Goal setpoint for a hand sample.

    Disengaged clutch leaves the goal untouched. Engaged: absolute mode scales
    the hand outright, relative mode offsets the engage-time goal by the
    scaled hand displacement since engage. The result is clamped into the
    goal bounds when configured.
    """
    require_finite(hand.position, "hand position")
    if not clutch.engaged:
        return current_goal
    if clutch.mode is ClutchMode.ABSOLUTE:
        goal = hand.position * config.scale
    else:
        goal = clutch.anchor_goal + (hand.position - clutch.anchor_hand) * config.scale
    if config.goal_bounds is not None:
        goal = config.goal_bounds.clamp_point(goal)
    return goal


def clutch_transition(
    clutch: ClutchState, engage: bool, hand: HandPose, current_goal: Vec3
) -> ClutchState:
    """Engage or release the clutch; repeated identical events are no-ops.

    Engaging records the hand and goal anchors that relative mode offsets
    from, which makes re-engagement jump-free in that mode.
    """
    if engage == clutch.engaged:
        return clutch
    if engage:
        return replace(clutch, engaged=True, anchor_hand=hand.position, anchor_goal=current_goal)
    return replace(clutch, engaged=False)


class ResampledPose(NamedTuple):
    position: Vec3
    timestamp: float
    stale: bool


def resample_input(stream: list[HandPose], dt: float) -> list[ResampledPose]:
    """Zero-order-hold resampling of a hand stream onto the tick grid.

    The grid starts at the first sample and each grid point holds the latest
    sample at or before it. Grid points more than STALE_AFTER behind the
    newest sample are flagged stale (the goal freezes there).
    """
    if dt <= 0:
        raise InputDomainError(f"dt must be positive, got {dt}")
    if not stream:
        return []
    for a, b in zip(stream, stream[1:]):
        if b.timestamp < a.timestamp:
            raise InputDomainError("stream timestamps must be nondecreasing")
    t0 = stream[0].timestamp
    t_end = stream[-1].timestamp
    n_ticks = int(math.floor((t_end - t0) / dt + 1e-9)) + 1
    out = []
    src = 0
    for k in range(n_ticks):
        t = t0 + k * dt
        while src + 1 < len(stream) and stream[src + 1].timestamp <= t:
            src += 1
        held = stream[src]
        out.append(
            ResampledPose(
                position=held.position,
                timestamp=t,
                stale=(t - held.timestamp) >= STALE_AFTER,
            )
        )
    return out


def reset_goal(scenario: Scenario) -> Vec3:
    """Goal used at simulation start: the drone's spawn location."""
    return scenario.spawn
