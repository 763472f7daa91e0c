"""Six-axis range sensing and its rendering as vibrotactile intensities.

The drone carries one single-ray rangefinder per motion axis direction
(+X front, -X back, +Y left, -Y right, +Z up, -Z down; yaw is fixed so body
axes equal world axes). A tactor's drive intensity follows the inverse law
i = M*T/d, clamped to M close in and silenced below a cutoff far out.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple

from .geometry import InputDomainError, Vec3
from .world import World


class SensorFaultError(RuntimeError):
    """Raised when a ray origin sits inside solid geometry."""


class Direction(IntEnum):
    FRONT = 0
    BACK = 1
    LEFT = 2
    RIGHT = 3
    UP = 4
    DOWN = 5

    @property
    def axis(self) -> int:
        return _AXES[self]

    @property
    def sign(self) -> float:
        return _SIGNS[self]

    def unit(self) -> Vec3:
        return Vec3().with_axis(self.axis, self.sign)

    @property
    def opposite(self) -> "Direction":
        return Direction(self ^ 1)


_AXES = (0, 0, 1, 1, 2, 2)
_SIGNS = (1.0, -1.0, 1.0, -1.0, 1.0, -1.0)

DIRECTIONS = tuple(Direction)

MAX_RANGE = 4.0  # m, matching the small time-of-flight rangers being modeled


class RangeReading(NamedTuple):
    distances: tuple[float, float, float, float, float, float]
    max_range: float


class HapticCue(NamedTuple):
    intensities: tuple[float, float, float, float, float, float]
    max_intensity: float

    def intensity(self, direction: Direction) -> float:
        return self.intensities[direction]


ZERO_CUE = HapticCue((0.0,) * 6, 1.0)


def raycast_range(origin: Vec3, direction: Direction, world: World, max_range: float = MAX_RANGE) -> float:
    """Distance along an axis ray to the nearest solid face or room wall.

    Capped at max_range; a full-scale value therefore means "no return".
    """
    if max_range <= 0:
        raise InputDomainError(f"max_range must be positive, got {max_range}")
    if not origin.is_finite():
        raise InputDomainError("ray origin must be finite")
    for box in world.solids:
        if box.strictly_contains(origin):
            raise SensorFaultError(f"ray origin {tuple(origin)} is inside an obstacle")

    axis, sign = direction.axis, direction.sign
    u, v = (a for a in range(3) if a != axis)
    if sign > 0:
        best = world.room.max[axis] - origin[axis]
    else:
        best = origin[axis] - world.room.min[axis]
    for box in world.solids:
        if not (box.min[u] <= origin[u] <= box.max[u] and box.min[v] <= origin[v] <= box.max[v]):
            continue
        if sign > 0:
            t = box.min[axis] - origin[axis]
            if t < 0 and box.max[axis] >= origin[axis]:
                t = 0.0  # origin on the near face plane, looking in
        else:
            t = origin[axis] - box.max[axis]
            if t < 0 and box.min[axis] <= origin[axis]:
                t = 0.0
        if 0.0 <= t < best:
            best = t
    return min(best, max_range)


def sense_six(position: Vec3, world: World, max_range: float = MAX_RANGE) -> RangeReading:
    """One ranger reading per direction, all taken at the same instant."""
    distances = tuple(raycast_range(position, d, world, max_range) for d in DIRECTIONS)
    return RangeReading(distances=distances, max_range=max_range)


# Default haptics parameters: intensity is a dimensionless duty-cycle fraction
# with M = 1, the near-field threshold T = 0.5 m, and a low-intensity cutoff
# below which far obstacles stay silent.
INTENSITY_MAX = 1.0
NEAR_THRESHOLD = 0.5
CUTOFF_FRACTION = 0.15


def cue_from_ranges(
    reading: RangeReading,
    m: float = INTENSITY_MAX,
    t: float = NEAR_THRESHOLD,
    i_min: float | None = None,
) -> HapticCue:
    """Map the six distances to tactor intensities via i = M*T/d.

    Values land in [0, M]: the law saturates at M for d <= T, and anything
    below the cutoff i_min (default 0.15*M) is zeroed outright.
    """
    if m <= 0 or t <= 0:
        raise InputDomainError("m and t must be positive")
    cutoff = CUTOFF_FRACTION * m if i_min is None else i_min
    intensities = []
    for d in reading.distances:
        if not math.isfinite(d) or d <= 0:
            raise InputDomainError(f"distance must be positive and finite, got {d}")
        i = min(m, m * t / d)
        intensities.append(i if i >= cutoff else 0.0)
    return HapticCue(intensities=tuple(intensities), max_intensity=m)


@dataclass(frozen=True)
class PulseTrial:
    direction: Direction
    onset: float     # s
    duration: float  # s


PULSE_DURATION = 0.45  # s, the measured mean reaction time reused as pulse length
PULSE_WAIT_MIN = 6.0
PULSE_WAIT_MAX = 12.0


def pulse_schedule(
    seed: int,
    n_trials: int = 20,
    wait_min: float = PULSE_WAIT_MIN,
    wait_max: float = PULSE_WAIT_MAX,
    duration: float = PULSE_DURATION,
) -> list[PulseTrial]:
    """Randomized single-tactor pulse sequence for perception checks.

    Directions are uniform over the six tactors and consecutive onsets are
    separated by a uniform wait in [wait_min, wait_max]; the whole schedule is
    a pure function of the seed.
    """
    if n_trials <= 0:
        raise InputDomainError("n_trials must be positive")
    if not (0 < wait_min <= wait_max):
        raise InputDomainError("need 0 < wait_min <= wait_max")
    if duration <= 0:
        raise InputDomainError("duration must be positive")
    rng = random.Random(seed)
    trials = []
    onset = 0.0
    for _ in range(n_trials):
        onset += rng.uniform(wait_min, wait_max)
        direction = Direction(rng.randrange(6))
        trials.append(PulseTrial(direction=direction, onset=onset, duration=duration))
    return trials
