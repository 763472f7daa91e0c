import math
import random

import numpy as np
import pytest

from hapticopter.geometry import Aabb, InputDomainError, Vec3
from hapticopter.sensing import (
    DIRECTIONS,
    Direction,
    RangeReading,
    SensorFaultError,
    cue_from_ranges,
    pulse_schedule,
    raycast_range,
    sense_six,
)
from hapticopter.special import chi2_sf
from hapticopter.world import World

ROOM = Aabb(Vec3(-5, -5, 0), Vec3(5, 5, 4))
EMPTY = World(room=ROOM)


# --- directions -----------------------------------------------------------------

def test_direction_axis_mapping_is_fixed_bijection():
    units = {d: d.unit() for d in DIRECTIONS}
    assert units[Direction.FRONT] == Vec3(1, 0, 0)
    assert units[Direction.BACK] == Vec3(-1, 0, 0)
    assert units[Direction.LEFT] == Vec3(0, 1, 0)
    assert units[Direction.RIGHT] == Vec3(0, -1, 0)
    assert units[Direction.UP] == Vec3(0, 0, 1)
    assert units[Direction.DOWN] == Vec3(0, 0, -1)
    assert len(set(units.values())) == 6
    for d in DIRECTIONS:
        assert Direction(int(d)) is d          # encode/decode identity
        assert d.opposite.unit() == -d.unit()


# --- raycast ----------------------------------------------------------------------

def test_empty_room_center_reading():
    reading = sense_six(Vec3(0, 0, 2), EMPTY, max_range=10.0)
    assert reading.distances == (5.0, 5.0, 5.0, 5.0, 2.0, 2.0)


def test_wall_face_straight_ahead():
    world = World(room=ROOM, obstacles=(Aabb(Vec3(2, -1, 0), Vec3(2.5, 1, 3)),))
    assert raycast_range(Vec3(0, 0, 1.5), Direction.FRONT, world, 10.0) == pytest.approx(2.0)


def test_adjacent_wall_affects_only_one_direction():
    world = World(room=ROOM, obstacles=(Aabb(Vec3(-1, 1.0, 0), Vec3(1, 1.5, 4)),))
    near = sense_six(Vec3(0, 0.8, 2), world, max_range=10.0)
    free = sense_six(Vec3(0, 0.8, 2), EMPTY, max_range=10.0)
    assert near.distances[Direction.LEFT] == pytest.approx(0.2)
    for d in DIRECTIONS:
        if d is not Direction.LEFT:
            assert near.distances[d] == free.distances[d]


def test_max_range_caps_reading():
    reading = sense_six(Vec3(0, 0, 2), EMPTY, max_range=1.5)
    assert reading.distances == (1.5, 1.5, 1.5, 1.5, 1.5, 1.5)


def test_origin_inside_obstacle_faults():
    world = World(room=ROOM, obstacles=(Aabb(Vec3(-1, -1, 0), Vec3(1, 1, 4)),))
    with pytest.raises(SensorFaultError):
        raycast_range(Vec3(0, 0, 2), Direction.FRONT, world, 4.0)


def _random_world(rng: random.Random, n_boxes: int = 8) -> World:
    boxes = []
    for _ in range(n_boxes):
        lo = Vec3(rng.uniform(-4.5, 3.5), rng.uniform(-4.5, 3.5), rng.uniform(0, 3))
        size = Vec3(rng.uniform(0.2, 1.2), rng.uniform(0.2, 1.2), rng.uniform(0.2, 1.0))
        boxes.append(Aabb(lo, lo + size))
    return World(room=ROOM, obstacles=tuple(boxes))


def _march_oracle(origin: Vec3, world: World, max_range: float, step: float = 1e-3) -> tuple:
    """March each axis ray in fixed steps; first sample inside a box or out of
    the room bounds gives the distance."""
    boxes = world.solids
    mins = np.array([[b.min.x, b.min.y, b.min.z] for b in boxes])
    maxs = np.array([[b.max.x, b.max.y, b.max.z] for b in boxes])
    room_lo = np.array([world.room.min.x, world.room.min.y, world.room.min.z])
    room_hi = np.array([world.room.max.x, world.room.max.y, world.room.max.z])
    o = np.array([origin.x, origin.y, origin.z])
    t = np.arange(step, max_range + step, step)
    out = []
    for d in DIRECTIONS:
        u = np.array(list(d.unit()))
        pts = o[None, :] + t[:, None] * u[None, :]
        in_box = np.zeros(len(t), dtype=bool)
        if len(boxes):
            inside = ((pts[:, None, :] >= mins[None, :, :]) & (pts[:, None, :] <= maxs[None, :, :])).all(-1)
            in_box = inside.any(-1)
        outside_room = ((pts < room_lo[None, :]) | (pts > room_hi[None, :])).any(-1)
        hits = np.flatnonzero(in_box | outside_room)
        out.append(float(t[hits[0]]) if len(hits) else max_range)
    return tuple(out)


def test_sense_six_matches_march_oracle_on_random_worlds():
    rng = random.Random(31415)
    checked = 0
    while checked < 1000:
        world = _random_world(rng)
        origin = Vec3(rng.uniform(-4.8, 4.8), rng.uniform(-4.8, 4.8), rng.uniform(0.05, 3.95))
        if any(b.distance_to(origin) == 0.0 for b in world.solids):
            continue
        reading = sense_six(origin, world, max_range=4.0)
        oracle = _march_oracle(origin, world, 4.0)
        for got, want in zip(reading.distances, oracle):
            assert abs(got - want) <= 1e-3 + 1e-9
        checked += 1


def _rotate_quarter(v: Vec3, about: Vec3) -> Vec3:
    # +90 degrees about the vertical axis through `about`: (x, y) -> (-y, x)
    dx, dy = v.x - about.x, v.y - about.y
    return Vec3(about.x - dy, about.y + dx, v.z)


def test_reading_permutes_under_quarter_turn():
    rng = random.Random(2718)
    center = Vec3(0, 0, 2)
    # front <- old right? rotating world +90deg about z maps +X geometry to +Y:
    # what was seen FRONT is now seen LEFT, LEFT -> BACK, BACK -> RIGHT, RIGHT -> FRONT
    permutation = {
        Direction.LEFT: Direction.FRONT,
        Direction.BACK: Direction.LEFT,
        Direction.RIGHT: Direction.BACK,
        Direction.FRONT: Direction.RIGHT,
        Direction.UP: Direction.UP,
        Direction.DOWN: Direction.DOWN,
    }
    for _ in range(50):
        world = _random_world(rng, n_boxes=5)
        rotated_boxes = []
        for b in world.obstacles:
            corners = [
                _rotate_quarter(Vec3(x, y, z), center)
                for x in (b.min.x, b.max.x)
                for y in (b.min.y, b.max.y)
                for z in (b.min.z, b.max.z)
            ]
            lo = Vec3(min(c.x for c in corners), min(c.y for c in corners), min(c.z for c in corners))
            hi = Vec3(max(c.x for c in corners), max(c.y for c in corners), max(c.z for c in corners))
            rotated_boxes.append(Aabb(lo, hi))
        rotated = World(room=ROOM, obstacles=tuple(rotated_boxes))

        origin = Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0.5, 3.5))
        if any(b.distance_to(origin) == 0.0 for b in world.solids):
            continue
        origin_rot = _rotate_quarter(origin, center)
        if any(b.distance_to(origin_rot) == 0.0 for b in rotated.solids):
            continue
        base = sense_six(origin, world, 4.0)
        turned = sense_six(origin_rot, rotated, 4.0)
        for new_dir, old_dir in permutation.items():
            assert turned.distances[new_dir] == base.distances[old_dir]


# --- cue law ---------------------------------------------------------------------

def _reading(*distances: float, max_range: float = 4.0) -> RangeReading:
    return RangeReading(distances=tuple(distances), max_range=max_range)


def test_cue_at_threshold_distance_is_full():
    cue = cue_from_ranges(_reading(0.5, 4, 4, 4, 4, 4), m=1.0, t=0.5)
    assert cue.intensities[0] == 1.0


def test_cue_at_double_threshold_is_half():
    cue = cue_from_ranges(_reading(1.0, 4, 4, 4, 4, 4), m=1.0, t=0.5)
    assert cue.intensities[0] == 0.5


def test_cue_clamps_below_threshold():
    cue = cue_from_ranges(_reading(0.25, 4, 4, 4, 4, 4), m=1.0, t=0.5)
    assert cue.intensities[0] == 1.0


def test_cue_cutoff_zeroes_faint_values():
    # at max range: M*T/d = 0.5/4 = 0.125 < 0.15 cutoff -> silent
    cue = cue_from_ranges(_reading(4.0, 4, 4, 4, 4, 4), m=1.0, t=0.5)
    assert cue.intensities == (0.0,) * 6


def test_cue_monotone_in_distance():
    rng = random.Random(5)
    for _ in range(1000):
        d1 = rng.uniform(0.01, 3.3)
        d2 = rng.uniform(0.01, 3.3)
        if d1 > d2:
            d1, d2 = d2, d1
        c1 = cue_from_ranges(_reading(d1, 4, 4, 4, 4, 4)).intensities[0]
        c2 = cue_from_ranges(_reading(d2, 4, 4, 4, 4, 4)).intensities[0]
        assert c1 >= c2


def test_cue_exact_inverse_law_above_cutoff():
    rng = random.Random(6)
    for _ in range(1000):
        d = rng.uniform(0.5, 10.0 / 3.0)  # T <= d <= cutoff distance
        i = cue_from_ranges(_reading(d, 4, 4, 4, 4, 4)).intensities[0]
        assert i * d == pytest.approx(0.5, rel=1e-12)


def test_cue_rejects_nonpositive_distance():
    with pytest.raises(InputDomainError):
        cue_from_ranges(_reading(-1.0, 4, 4, 4, 4, 4))
    with pytest.raises(InputDomainError):
        cue_from_ranges(_reading(0.0, 4, 4, 4, 4, 4))


def test_cue_never_exceeds_max():
    rng = random.Random(7)
    for _ in range(500):
        d = rng.uniform(1e-6, 8.0)
        cue = cue_from_ranges(_reading(d, 4, 4, 4, 4, 4), m=2.5, t=0.5)
        assert 0.0 <= cue.intensities[0] <= 2.5


# --- pulse scheduler ---------------------------------------------------------------

def test_pulse_schedule_gaps_and_duration():
    trials = pulse_schedule(seed=10, n_trials=20)
    assert len(trials) == 20
    onsets = [t.onset for t in trials]
    gaps = [onsets[0]] + [b - a for a, b in zip(onsets, onsets[1:])]
    assert all(6.0 <= g <= 12.0 for g in gaps)
    assert all(t.duration == 0.45 for t in trials)
    assert onsets == sorted(onsets)


def test_pulse_schedule_deterministic():
    assert pulse_schedule(seed=4, n_trials=50) == pulse_schedule(seed=4, n_trials=50)
    assert pulse_schedule(seed=4, n_trials=50) != pulse_schedule(seed=5, n_trials=50)


def test_pulse_schedule_direction_frequencies_and_gap_uniformity():
    trials = pulse_schedule(seed=123, n_trials=10_000)
    counts = [0] * 6
    for t in trials:
        counts[t.direction] += 1
    for c in counts:
        assert abs(c / 10_000 - 1 / 6) <= 0.02

    onsets = [t.onset for t in trials]
    gaps = [onsets[0]] + [b - a for a, b in zip(onsets, onsets[1:])]
    n_bins = 12
    bins = [0] * n_bins
    for g in gaps:
        idx = min(int((g - 6.0) / 6.0 * n_bins), n_bins - 1)
        bins[idx] += 1
    expected = len(gaps) / n_bins
    stat = sum((b - expected) ** 2 / expected for b in bins)
    p = chi2_sf(stat, n_bins - 1)
    assert p > 0.01


def test_pulse_schedule_input_domain():
    with pytest.raises(InputDomainError):
        pulse_schedule(seed=0, n_trials=0)
    with pytest.raises(InputDomainError):
        pulse_schedule(seed=0, n_trials=5, wait_min=0.0)
    with pytest.raises(InputDomainError):
        pulse_schedule(seed=0, n_trials=5, wait_min=3.0, wait_max=2.0)
