"""Vector and axis-aligned-box primitives shared by the whole simulator."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


class Vec3(NamedTuple):
    """3D point or vector, meters (or m/s, m/s^2 by context)."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __mul__(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def dist_to(self, other: "Vec3") -> float:
        return (self - other).norm()

    def with_axis(self, axis: int, value: float) -> "Vec3":
        parts = list(self)
        parts[axis] = value
        return Vec3(*parts)

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)


def clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


class InputDomainError(ValueError):
    """Raised when an operation receives values outside its input domain."""


def require_finite(v: Vec3, what: str) -> None:
    if not v.is_finite():
        raise InputDomainError(f"{what} must be finite, got {tuple(v)}")


@dataclass(frozen=True)
class Aabb:
    """Axis-aligned box, `min` strictly below `max` on every axis."""

    min: Vec3
    max: Vec3

    def __post_init__(self) -> None:
        if not (self.min.is_finite() and self.max.is_finite()):
            raise InputDomainError("box corners must be finite")
        if not all(self.min[a] < self.max[a] for a in range(3)):
            raise InputDomainError(f"degenerate box: min={tuple(self.min)} max={tuple(self.max)}")

    def contains(self, p: Vec3) -> bool:
        return (
            self.min.x <= p.x <= self.max.x
            and self.min.y <= p.y <= self.max.y
            and self.min.z <= p.z <= self.max.z
        )

    def strictly_contains(self, p: Vec3) -> bool:
        return (
            self.min.x < p.x < self.max.x
            and self.min.y < p.y < self.max.y
            and self.min.z < p.z < self.max.z
        )

    def contains_box(self, other: "Aabb") -> bool:
        return self.contains(other.min) and self.contains(other.max)

    def overlaps(self, other: "Aabb") -> bool:
        return all(self.min[a] < other.max[a] and other.min[a] < self.max[a] for a in range(3))

    def closest_point(self, p: Vec3) -> Vec3:
        return Vec3(
            clamp(p.x, self.min.x, self.max.x),
            clamp(p.y, self.min.y, self.max.y),
            clamp(p.z, self.min.z, self.max.z),
        )

    def distance_to(self, p: Vec3) -> float:
        return p.dist_to(self.closest_point(p))

    def center(self) -> Vec3:
        return Vec3(
            0.5 * (self.min.x + self.max.x),
            0.5 * (self.min.y + self.max.y),
            0.5 * (self.min.z + self.max.z),
        )

    def size(self) -> Vec3:
        return self.max - self.min

    def translated(self, offset: Vec3) -> "Aabb":
        return Aabb(self.min + offset, self.max + offset)

    def clamp_point(self, p: Vec3, inset: float = 0.0) -> Vec3:
        """Clamp a point into the box, shrunk by `inset` on every face."""
        return Vec3(
            clamp(p.x, self.min.x + inset, self.max.x - inset),
            clamp(p.y, self.min.y + inset, self.max.y - inset),
            clamp(p.z, self.min.z + inset, self.max.z - inset),
        )
