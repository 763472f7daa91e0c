"""Obstacle worlds, the four experiment task layouts, and contact geometry.

All geometry is axis-aligned. Obstacle ids used in contacts and events index
into ``World.solids`` (standalone obstacles first, then gate frame boxes in
gate order); the room boundary is id ``ROOM_ID``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from .geometry import Aabb, InputDomainError, Vec3

ROOM_ID = -1

DRONE_RADIUS = 0.10  # collision sphere, roughly a small quadrotor footprint


class ScenarioError(ValueError):
    """Raised when a world or scenario fails construction-time validation."""


class Task(str, Enum):
    GATE_COURSE = "gate_course"
    WALL_APPROACH = "wall_approach"
    LATERAL_GATE = "lateral_gate"
    VERTICAL_GATE = "vertical_gate"


def _other_axes(axis: int) -> tuple[int, int]:
    return tuple(a for a in range(3) if a != axis)  # type: ignore[return-value]


@dataclass(frozen=True)
class Gate:
    """Rectangular opening in a panel. The opening is a rectangle in the
    crossing plane, described by coordinate ranges on the two non-plane axes
    (ascending axis order)."""

    id: int
    plane_axis: int
    plane_coord: float
    opening: tuple[tuple[float, float], tuple[float, float]]
    frame: tuple[Aabb, ...]

    def __post_init__(self) -> None:
        if self.plane_axis not in (0, 1, 2):
            raise ScenarioError(f"gate {self.id}: bad plane axis {self.plane_axis}")
        for lo, hi in self.opening:
            if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                raise ScenarioError(f"gate {self.id}: degenerate opening range ({lo}, {hi})")
        if not self.frame:
            raise ScenarioError(f"gate {self.id}: frame is empty")
        for box in self.frame:
            if self._box_overlaps_opening(box):
                raise ScenarioError(f"gate {self.id}: frame box overlaps the opening")

    def _box_overlaps_opening(self, box: Aabb) -> bool:
        u, v = _other_axes(self.plane_axis)
        (ulo, uhi), (vlo, vhi) = self.opening
        return (
            box.min[u] < uhi
            and ulo < box.max[u]
            and box.min[v] < vhi
            and vlo < box.max[v]
        )

    def point_in_opening(self, p: Vec3) -> bool:
        u, v = _other_axes(self.plane_axis)
        (ulo, uhi), (vlo, vhi) = self.opening
        return ulo <= p[u] <= uhi and vlo <= p[v] <= vhi

    def opening_center(self) -> Vec3:
        u, v = _other_axes(self.plane_axis)
        (ulo, uhi), (vlo, vhi) = self.opening
        parts = [0.0, 0.0, 0.0]
        parts[self.plane_axis] = self.plane_coord
        parts[u] = 0.5 * (ulo + uhi)
        parts[v] = 0.5 * (vlo + vhi)
        return Vec3(*parts)


@dataclass(frozen=True)
class World:
    room: Aabb
    obstacles: tuple[Aabb, ...] = ()
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        solids = tuple(self.obstacles) + tuple(box for g in self.gates for box in g.frame)
        for box in solids:
            if not self.room.contains_box(box):
                raise ScenarioError(f"obstacle {tuple(box.min)}..{tuple(box.max)} outside the room")
        object.__setattr__(self, "_solids", solids)

    @property
    def solids(self) -> tuple[Aabb, ...]:
        """Standalone obstacles followed by every gate frame box."""
        return self._solids  # type: ignore[attr-defined]

    def translated(self, offset: Vec3) -> "World":
        return World(
            room=self.room.translated(offset),
            obstacles=tuple(b.translated(offset) for b in self.obstacles),
            gates=tuple(
                Gate(
                    id=g.id,
                    plane_axis=g.plane_axis,
                    plane_coord=g.plane_coord + offset[g.plane_axis],
                    opening=tuple(
                        (lo + offset[a], hi + offset[a])
                        for a, (lo, hi) in zip(_other_axes(g.plane_axis), g.opening)
                    ),
                    frame=tuple(b.translated(offset) for b in g.frame),
                )
                for g in self.gates
            ),
        )


class Contact(NamedTuple):
    obstacle_id: int  # index into World.solids, or ROOM_ID
    normal: Vec3      # unit vector pointing out of the obstacle
    depth: float      # how far the sphere must move along `normal` to separate


def _sphere_box_contact(center: Vec3, radius: float, box: Aabb) -> tuple[Vec3, float] | None:
    closest = box.closest_point(center)
    delta = center - closest
    d2 = delta.dot(delta)
    if d2 > 0.0:
        dist = math.sqrt(d2)
        if dist >= radius:
            return None
        return delta * (1.0 / dist), radius - dist
    # Center inside (or on the surface of) the box: exit through the nearest face.
    best_axis, best_sign, best_dist = 0, 1.0, math.inf
    for a in range(3):
        lo_dist = center[a] - box.min[a]
        hi_dist = box.max[a] - center[a]
        if lo_dist < best_dist:
            best_axis, best_sign, best_dist = a, -1.0, lo_dist
        if hi_dist < best_dist:
            best_axis, best_sign, best_dist = a, 1.0, hi_dist
    normal = Vec3().with_axis(best_axis, best_sign)
    return normal, radius + best_dist


def _room_contact(center: Vec3, radius: float, room: Aabb) -> tuple[Vec3, float] | None:
    best: tuple[Vec3, float] | None = None
    for a in range(3):
        low_pen = (room.min[a] + radius) - center[a]
        if low_pen > 0.0 and (best is None or low_pen > best[1]):
            best = (Vec3().with_axis(a, 1.0), low_pen)
        high_pen = center[a] - (room.max[a] - radius)
        if high_pen > 0.0 and (best is None or high_pen > best[1]):
            best = (Vec3().with_axis(a, -1.0), high_pen)
    return best


def collision_check(position: Vec3, radius: float, world: World) -> Contact | None:
    """Deepest contact of a sphere against the world, or None when free.

    Covers both obstacle overlap and leaving the room.
    """
    if radius <= 0.0:
        raise InputDomainError(f"radius must be positive, got {radius}")
    if not position.is_finite():
        raise InputDomainError("position must be finite")
    best: Contact | None = None
    room_hit = _room_contact(position, radius, world.room)
    if room_hit is not None:
        best = Contact(ROOM_ID, room_hit[0], room_hit[1])
    for i, box in enumerate(world.solids):
        hit = _sphere_box_contact(position, radius, box)
        if hit is not None and (best is None or hit[1] > best.depth):
            best = Contact(i, hit[0], hit[1])
    return best


def contacts_within(position: Vec3, radius: float, world: World) -> frozenset[int]:
    """Ids of all solids (and the room) the sphere touches or penetrates."""
    touching = set()
    if _room_contact(position, radius, world.room) is not None:
        touching.add(ROOM_ID)
    for i, box in enumerate(world.solids):
        if box.distance_to(position) < radius:
            touching.add(i)
    return frozenset(touching)


class Crossing(NamedTuple):
    point: Vec3
    through_opening: bool


def gate_crossing_check(prev: Vec3, curr: Vec3, gate: Gate) -> Crossing | None:
    """Detect the segment prev->curr piercing the gate plane.

    Segments starting exactly on the plane do not count, so a trajectory
    sampled through the plane reports each pass exactly once.
    """
    if not (prev.is_finite() and curr.is_finite()):
        raise InputDomainError("segment endpoints must be finite")
    a, c = gate.plane_axis, gate.plane_coord
    d0 = prev[a] - c
    d1 = curr[a] - c
    if d0 == 0.0 or d0 * d1 > 0.0:
        return None
    t = d0 / (d0 - d1)
    point = prev + (curr - prev) * t
    point = point.with_axis(a, c)  # kill the interpolation residual on the plane axis
    return Crossing(point=point, through_opening=gate.point_in_opening(point))


@dataclass(frozen=True)
class Scenario:
    task: Task
    world: World
    spawn: Vec3
    gate_order: tuple[int, ...] = ()
    target_wall: int | None = None  # index into world.obstacles (WallApproach)
    name: str = ""

    def __post_init__(self) -> None:
        validate_scenario(self)

    def gate_by_id(self, gate_id: int) -> Gate:
        for g in self.world.gates:
            if g.id == gate_id:
                return g
        raise ScenarioError(f"no gate with id {gate_id}")


def validate_scenario(scenario: Scenario) -> None:
    world = scenario.world
    if not world.room.contains(scenario.spawn):
        raise ScenarioError("spawn outside the room")
    if collision_check(scenario.spawn, DRONE_RADIUS, world) is not None:
        raise ScenarioError("spawn position is not collision-free")
    ids = {g.id for g in world.gates}
    if len(ids) != len(world.gates):
        raise ScenarioError("duplicate gate ids")
    for gate_id in scenario.gate_order:
        if gate_id not in ids:
            raise ScenarioError(f"gate_order references unknown gate {gate_id}")
    if scenario.target_wall is not None and not (0 <= scenario.target_wall < len(world.obstacles)):
        raise ScenarioError(f"target_wall index {scenario.target_wall} out of range")


# --- default worlds -----------------------------------------------------------
#
# The room mimics a ~10 x 10 x 4 m motion-tracking hall: x, y in [-5, 5],
# z in [0, 4], spawn heights around 1.2 m. Gate walls are 0.6 m thick so the
# proximity field inside an opening is informative, not a knife edge.

ROOM = Aabb(Vec3(-5.0, -5.0, 0.0), Vec3(5.0, 5.0, 4.0))

GATE_WALL_THICKNESS = 0.6
OPENING_WIDTH = 0.8


def make_gate(
    gate_id: int,
    plane_axis: int,
    plane_coord: float,
    panel: tuple[tuple[float, float], tuple[float, float]],
    opening: tuple[tuple[float, float], tuple[float, float]],
    thickness: float = GATE_WALL_THICKNESS,
) -> Gate:
    """Build a gate whose frame is the panel rectangle minus the opening.

    `panel` and `opening` are ((u_lo, u_hi), (v_lo, v_hi)) ranges over the two
    non-plane axes in ascending axis order. Strips of zero width (opening flush
    with the panel edge) are dropped, which is how full-height slots appear.
    """
    u, v = _other_axes(plane_axis)
    (pu_lo, pu_hi), (pv_lo, pv_hi) = panel
    (ou_lo, ou_hi), (ov_lo, ov_hi) = opening
    if not (pu_lo <= ou_lo < ou_hi <= pu_hi and pv_lo <= ov_lo < ov_hi <= pv_hi):
        raise ScenarioError(f"gate {gate_id}: opening not inside the panel")
    half = thickness / 2.0
    w_lo, w_hi = plane_coord - half, plane_coord + half

    def box(u_range: tuple[float, float], v_range: tuple[float, float]) -> Aabb | None:
        if u_range[0] >= u_range[1] or v_range[0] >= v_range[1]:
            return None
        lo = [0.0, 0.0, 0.0]
        hi = [0.0, 0.0, 0.0]
        lo[plane_axis], hi[plane_axis] = w_lo, w_hi
        lo[u], hi[u] = u_range
        lo[v], hi[v] = v_range
        return Aabb(Vec3(*lo), Vec3(*hi))

    strips = [
        box((pu_lo, ou_lo), (pv_lo, pv_hi)),   # low-u side
        box((ou_hi, pu_hi), (pv_lo, pv_hi)),   # high-u side
        box((ou_lo, ou_hi), (pv_lo, ov_lo)),   # low-v strip
        box((ou_lo, ou_hi), (ov_hi, pv_hi)),   # high-v strip
    ]
    frame = tuple(s for s in strips if s is not None)
    return Gate(gate_id, plane_axis, plane_coord, ((ou_lo, ou_hi), (ov_lo, ov_hi)), frame)


def _wall_approach(wall_distance: float = 4.0, spawn: Vec3 | None = None) -> Scenario:
    spawn = spawn if spawn is not None else Vec3(-2.0, 0.0, 1.2)
    face_x = spawn.x + wall_distance
    wall = Aabb(Vec3(face_x, -2.0, 0.0), Vec3(face_x + 0.2, 2.0, 2.4))
    world = World(room=ROOM, obstacles=(wall,))
    return Scenario(
        task=Task.WALL_APPROACH, world=world, spawn=spawn, target_wall=0, name="wall_approach"
    )


def _lateral_gate(opening_width: float = OPENING_WIDTH) -> Scenario:
    if opening_width <= 2 * DRONE_RADIUS:
        raise ScenarioError(f"lateral opening width {opening_width} too narrow to pass")
    half = opening_width / 2.0
    gate = make_gate(
        0,
        plane_axis=1,
        plane_coord=0.0,
        panel=((-5.0, 5.0), (0.0, 4.0)),       # full room span in x, full height slot
        opening=((-half, half), (0.0, 4.0)),
    )
    world = World(room=ROOM, gates=(gate,))
    return Scenario(
        task=Task.LATERAL_GATE,
        world=world,
        spawn=Vec3(0.0, -2.5, 1.2),
        gate_order=(0,),
        name="lateral_gate",
    )


def _vertical_gate(opening_width: float = OPENING_WIDTH) -> Scenario:
    if opening_width <= 2 * DRONE_RADIUS:
        raise ScenarioError(f"vertical opening width {opening_width} too narrow to pass")
    half = opening_width / 2.0
    gate = make_gate(
        0,
        plane_axis=2,
        plane_coord=2.0,
        panel=((-5.0, 5.0), (-5.0, 5.0)),      # slab across the whole room at 2 m
        opening=((-half, half), (-half, half)),
    )
    world = World(room=ROOM, gates=(gate,))
    return Scenario(
        task=Task.VERTICAL_GATE,
        world=world,
        spawn=Vec3(0.0, 0.0, 1.2),
        gate_order=(0,),
        name="vertical_gate",
    )


def _gate_course() -> Scenario:
    return load_scenario_json(_gate_course_document())


def _gate_course_document() -> dict:
    from importlib.resources import files

    text = files("hapticopter.data").joinpath("gate_course.json").read_text()
    return json.loads(text)


_BUILDERS = {
    Task.GATE_COURSE: _gate_course,
    Task.WALL_APPROACH: _wall_approach,
    Task.LATERAL_GATE: _lateral_gate,
    Task.VERTICAL_GATE: _vertical_gate,
}


def build_scenario(task: Task | str, **overrides) -> Scenario:
    """Default scenario for a task; overrides are builder keyword arguments."""
    task = Task(task)
    try:
        return _BUILDERS[task](**overrides)
    except (InputDomainError, TypeError) as exc:
        raise ScenarioError(f"cannot build {task.value}: {exc}") from exc


# --- JSON scenario files ------------------------------------------------------

_SCENARIO_FIELDS = {"task", "room", "obstacles", "gates", "spawn", "gate_order", "target_wall", "name"}
_GATE_FIELDS = {"id", "plane_axis", "plane_coord", "opening", "frame"}
_AXIS_NAMES = {"x": 0, "y": 1, "z": 2}


def _vec_from_json(v, what: str) -> Vec3:
    if not (isinstance(v, list) and len(v) == 3 and all(isinstance(c, (int, float)) for c in v)):
        raise ScenarioError(f"{what}: expected [x, y, z], got {v!r}")
    return Vec3(float(v[0]), float(v[1]), float(v[2]))


def _box_from_json(b, what: str) -> Aabb:
    if not (isinstance(b, dict) and set(b) == {"min", "max"}):
        raise ScenarioError(f"{what}: expected {{min, max}}, got {b!r}")
    try:
        return Aabb(_vec_from_json(b["min"], what), _vec_from_json(b["max"], what))
    except InputDomainError as exc:
        raise ScenarioError(f"{what}: {exc}") from exc


def _gate_from_json(g) -> Gate:
    if not isinstance(g, dict):
        raise ScenarioError(f"gate entry must be an object, got {g!r}")
    unknown = set(g) - _GATE_FIELDS
    if unknown:
        raise ScenarioError(f"gate has unknown fields: {sorted(unknown)}")
    missing = _GATE_FIELDS - set(g)
    if missing:
        raise ScenarioError(f"gate missing fields: {sorted(missing)}")
    axis = g["plane_axis"]
    if isinstance(axis, str):
        if axis not in _AXIS_NAMES:
            raise ScenarioError(f"gate {g['id']}: unknown axis {axis!r}")
        axis = _AXIS_NAMES[axis]
    opening = g["opening"]
    if not (isinstance(opening, list) and len(opening) == 2):
        raise ScenarioError(f"gate {g['id']}: opening must be two [lo, hi] ranges")
    ranges = []
    for r in opening:
        if not (isinstance(r, list) and len(r) == 2):
            raise ScenarioError(f"gate {g['id']}: opening range {r!r} malformed")
        ranges.append((float(r[0]), float(r[1])))
    frame = tuple(_box_from_json(b, f"gate {g['id']} frame") for b in g["frame"])
    try:
        return Gate(int(g["id"]), int(axis), float(g["plane_coord"]), tuple(ranges), frame)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"gate {g['id']}: {exc}") from exc


def load_scenario_json(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    unknown = set(doc) - _SCENARIO_FIELDS
    if unknown:
        raise ScenarioError(f"scenario has unknown fields: {sorted(unknown)}")
    for required in ("task", "room", "spawn"):
        if required not in doc:
            raise ScenarioError(f"scenario missing field {required!r}")
    try:
        task = Task(doc["task"])
    except ValueError as exc:
        raise ScenarioError(f"unknown task {doc['task']!r}") from exc
    room = _box_from_json(doc["room"], "room")
    obstacles = tuple(_box_from_json(b, "obstacle") for b in doc.get("obstacles", []))
    gates = tuple(_gate_from_json(g) for g in doc.get("gates", []))
    try:
        world = World(room=room, obstacles=obstacles, gates=gates)
        return Scenario(
            task=task,
            world=world,
            spawn=_vec_from_json(doc["spawn"], "spawn"),
            gate_order=tuple(int(i) for i in doc.get("gate_order", [])),
            target_wall=None if doc.get("target_wall") is None else int(doc["target_wall"]),
            name=str(doc.get("name", task.value)),
        )
    except InputDomainError as exc:
        raise ScenarioError(str(exc)) from exc


def scenario_to_json(scenario: Scenario) -> dict:
    def box(b: Aabb) -> dict:
        return {"min": list(b.min), "max": list(b.max)}

    return {
        "task": scenario.task.value,
        "name": scenario.name,
        "room": box(scenario.world.room),
        "obstacles": [box(b) for b in scenario.world.obstacles],
        "gates": [
            {
                "id": g.id,
                "plane_axis": g.plane_axis,
                "plane_coord": g.plane_coord,
                "opening": [list(r) for r in g.opening],
                "frame": [box(b) for b in g.frame],
            }
            for g in scenario.world.gates
        ],
        "spawn": list(scenario.spawn),
        "gate_order": list(scenario.gate_order),
        "target_wall": scenario.target_wall,
    }


def load_scenario_file(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: not valid JSON ({exc})") from exc
    return load_scenario_json(doc)
