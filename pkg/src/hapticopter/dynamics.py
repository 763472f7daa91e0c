"""Fixed-timestep point-mass drone with a PID position controller.

All transitions are pure: they take a state and return a new one, so a tick
sequence is bit-reproducible from identical inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import InputDomainError, Vec3, clamp, require_finite
from .world import DRONE_RADIUS, World, collision_check, contacts_within

TICK_RATE_HZ = 120.0  # matched to the hand-tracking stream rate

# Touch detection slack, plus a wider release distance so a resting drone
# whose controller micro-bounces against a face stays one single contact.
CONTACT_SLACK = 1e-6
CONTACT_RELEASE = 2e-3


@dataclass(frozen=True)
class DroneState:
    position: Vec3
    velocity: Vec3 = Vec3()
    time: float = 0.0


@dataclass(frozen=True)
class PidGains:
    kp: float = 6.0
    ki: float = 0.2
    kd: float = 3.2
    i_max: float = 0.5    # per-axis integral clamp
    i_band: float = 0.25  # integrate only while |error| is inside this band, m
    a_max: float = 6.0    # per-axis acceleration clamp, m/s^2
    v_max: float = 2.0    # speed clamp, m/s

    def __post_init__(self) -> None:
        if self.kp < 0 or self.ki < 0 or self.kd < 0:
            raise InputDomainError("PID gains must be nonnegative")
        if self.a_max <= 0 or self.v_max <= 0:
            raise InputDomainError("a_max and v_max must be positive")


@dataclass(frozen=True)
class PidState:
    integral: Vec3 = Vec3()
    prev_error: Vec3 = Vec3()
    initialized: bool = False


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1.0 / TICK_RATE_HZ
    drag: float = 0.3          # 1/s, linear velocity damping
    v_max: float = 2.0
    a_max: float = 6.0
    radius: float = DRONE_RADIUS

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise InputDomainError("dt must be positive")
        if self.v_max <= 0 or self.a_max <= 0 or self.radius <= 0:
            raise InputDomainError("v_max, a_max, and radius must be positive")


def pid_step(
    state: PidState, gains: PidGains, goal: Vec3, measured: Vec3, dt: float
) -> tuple[Vec3, PidState]:
    """One PID update; returns the commanded acceleration and the next state.

    The derivative acts on the error and is suppressed on the first call.
    Anti-windup is twofold: each integral axis only accumulates while its
    error is inside the i_band separation band (large transients do not
    charge it) and is clamped to +-i_max; the output clamps per axis to
    +-a_max.
    """
    require_finite(goal, "goal")
    require_finite(measured, "measured")
    if not (math.isfinite(dt) and dt > 0):
        raise InputDomainError(f"dt must be positive and finite, got {dt}")

    error = goal - measured

    def integrate(acc: float, err: float) -> float:
        if abs(err) >= gains.i_band:
            return acc
        return clamp(acc + err * dt, -gains.i_max, gains.i_max)

    integral = Vec3(
        integrate(state.integral.x, error.x),
        integrate(state.integral.y, error.y),
        integrate(state.integral.z, error.z),
    )
    if state.initialized:
        derivative = (error - state.prev_error) * (1.0 / dt)
    else:
        derivative = Vec3()
    accel = Vec3(
        clamp(gains.kp * error.x + gains.ki * integral.x + gains.kd * derivative.x,
              -gains.a_max, gains.a_max),
        clamp(gains.kp * error.y + gains.ki * integral.y + gains.kd * derivative.y,
              -gains.a_max, gains.a_max),
        clamp(gains.kp * error.z + gains.ki * integral.z + gains.kd * derivative.z,
              -gains.a_max, gains.a_max),
    )
    return accel, PidState(integral=integral, prev_error=error, initialized=True)


def point_mass_step(state: DroneState, accel: Vec3, config: SimConfig) -> DroneState:
    """Semi-implicit Euler step with linear drag and a speed clamp."""
    require_finite(accel, "accel")
    require_finite(state.position, "position")
    require_finite(state.velocity, "velocity")
    dt = config.dt
    v = Vec3(
        state.velocity.x + (accel.x - config.drag * state.velocity.x) * dt,
        state.velocity.y + (accel.y - config.drag * state.velocity.y) * dt,
        state.velocity.z + (accel.z - config.drag * state.velocity.z) * dt,
    )
    speed = v.norm()
    if speed > config.v_max:
        v = v * (config.v_max / speed)
    return DroneState(
        position=state.position + v * dt,
        velocity=v,
        time=state.time + dt,
    )


@dataclass(frozen=True)
class CollisionEvent:
    time: float
    obstacle_id: int
    point: Vec3


@dataclass(frozen=True)
class TickResult:
    state: DroneState
    pid: PidState
    events: tuple[CollisionEvent, ...]
    contacts: frozenset[int]   # solids currently touched; feed back into the next tick


def sim_tick(
    state: DroneState,
    goal: Vec3,
    pid: PidState,
    gains: PidGains,
    config: SimConfig,
    world: World,
    active_contacts: frozenset[int] = frozenset(),
) -> TickResult:
    """Advance one tick: PID toward the goal, integrate, resolve contacts.

    Penetrations are projected out along the contact normal and the inward
    velocity component is zeroed (slide response). A collision event is
    emitted once per contact onset: ids already in `active_contacts` stay
    silent while the drone remains against the same surface.
    """
    accel, pid_next = pid_step(pid, gains, goal, state.position, config.dt)
    next_state = point_mass_step(state, accel, config)

    position, velocity = next_state.position, next_state.velocity
    for _ in range(8):
        contact = collision_check(position, config.radius, world)
        if contact is None:
            break
        position = position + contact.normal * contact.depth
        v_into = velocity.dot(contact.normal)
        if v_into < 0.0:
            velocity = velocity - contact.normal * v_into

    touched = contacts_within(position, config.radius + CONTACT_SLACK, world)
    events = tuple(
        CollisionEvent(time=next_state.time, obstacle_id=i, point=position)
        for i in sorted(touched - active_contacts)
    )
    lingering = contacts_within(position, config.radius + CONTACT_RELEASE, world)
    still_active = touched | (active_contacts & lingering)
    resolved = DroneState(position=position, velocity=velocity, time=next_state.time)
    return TickResult(state=resolved, pid=pid_next, events=events, contacts=still_active)
