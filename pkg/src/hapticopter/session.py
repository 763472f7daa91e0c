"""Closed-loop simulation session: input mapping, dynamics, sensing, logging.

One `SimSession` owns one drone in one scenario. A single driver (the batch
harness or a gateway connection) applies hand/clutch input and calls `tick`;
every tick appends a sample to the trial log and may emit events (collisions,
gate crossings, task completion, stale input). Identical input sequences
produce bit-identical logs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import DroneState, PidGains, PidState, SimConfig, sim_tick
from .geometry import Vec3
from .sensing import HapticCue, MAX_RANGE, cue_from_ranges, sense_six
from .teleop import (
    STALE_AFTER,
    ClutchState,
    HandPose,
    MappingConfig,
    clutch_transition,
    map_hand_to_goal,
    reset_goal,
)
from .trial import EventKind, TrialEvent, TrialLog, TrialSample
from .world import Scenario, Task, gate_crossing_check

# Wall-approach completion: the goal command must stay put this long ...
HOLD_SECONDS = 3.0
# ... moving less than this in total over the window.
HOLD_TOLERANCE = 1e-3


@dataclass(frozen=True)
class HapticsConfig:
    max_intensity: float = 1.0
    near_threshold: float = 0.5
    cutoff: float | None = None       # None = the standard fraction of max
    max_range: float = MAX_RANGE


class SimSession:
    def __init__(
        self,
        scenario: Scenario,
        *,
        gains: PidGains | None = None,
        config: SimConfig | None = None,
        mapping: MappingConfig | None = None,
        haptics: HapticsConfig | None = None,
        meta: dict | None = None,
    ):
        self.scenario = scenario
        self.world = scenario.world
        self.gains = gains or PidGains()
        self.config = config or SimConfig()
        self.mapping = mapping or MappingConfig.simulation(scenario.world.room)
        self.haptics = haptics or HapticsConfig()

        self.state = DroneState(position=scenario.spawn, velocity=Vec3(), time=0.0)
        self.goal = reset_goal(scenario)
        self.pid = PidState()
        self.clutch = ClutchState(mode=self.mapping.mode)
        self.contacts: frozenset[int] = frozenset()
        self.tick_index = 0

        self._last_hand: HandPose | None = None
        self._pending_hand: HandPose | None = None
        self._ticks_since_input = 0
        self._stale_announced = False

        self._completed = False
        self._next_gate = 0            # position in scenario.gate_order
        self._goal_trail = [(0.0, 0.0)]  # (time, cumulative goal travel)
        self._goal_travel = 0.0

        self.cue = self._sense()
        self.log = TrialLog(meta=dict(meta or {}))
        self.log.meta.setdefault("task", scenario.task.value)
        self.log.meta.setdefault("dt", self.config.dt)
        self._append_sample()

    # -- input ------------------------------------------------------------

    def apply_hand(self, position: Vec3, timestamp: float | None = None) -> None:
        ts = self.state.time if timestamp is None else timestamp
        self._pending_hand = HandPose(position=position, timestamp=ts)

    def apply_clutch(self, engaged: bool) -> None:
        hand = self._last_hand or HandPose(position=Vec3(), timestamp=self.state.time)
        self.clutch = clutch_transition(self.clutch, engaged, hand, self.goal)

    def reset_goal(self) -> None:
        self.goal = reset_goal(self.scenario)

    # -- stepping ---------------------------------------------------------

    def tick(self) -> list[TrialEvent]:
        """Advance one fixed step; returns the events emitted this tick."""
        events: list[TrialEvent] = []

        if self._pending_hand is not None:
            self._last_hand = self._pending_hand
            self._pending_hand = None
            self._ticks_since_input = 0
            self._stale_announced = False
            self.goal = map_hand_to_goal(self._last_hand, self.clutch, self.mapping, self.goal)
        else:
            self._ticks_since_input += 1
            age = self._ticks_since_input * self.config.dt
            if (
                self.clutch.engaged
                and self._last_hand is not None
                and age >= STALE_AFTER
                and not self._stale_announced
            ):
                # goal is already frozen by zero-order hold; flag it once
                self._stale_announced = True
                events.append(
                    TrialEvent(
                        time=self.state.time + self.config.dt,
                        kind=EventKind.STALE_INPUT,
                        payload={"age": age},
                    )
                )

        prev_position = self.state.position
        result = sim_tick(
            self.state, self.goal, self.pid, self.gains, self.config, self.world, self.contacts
        )
        self.state, self.pid, self.contacts = result.state, result.pid, result.contacts
        self.tick_index += 1
        now = self.state.time

        for col in result.events:
            events.append(
                TrialEvent(
                    time=col.time,
                    kind=EventKind.COLLISION,
                    payload={"obstacle": col.obstacle_id, "point": list(col.point)},
                )
            )

        for gate in self.world.gates:
            crossing = gate_crossing_check(prev_position, self.state.position, gate)
            if crossing is not None and crossing.through_opening:
                events.append(
                    TrialEvent(
                        time=now,
                        kind=EventKind.GATE_CROSS,
                        payload={"gate": gate.id, "point": list(crossing.point)},
                    )
                )
                self._note_gate_cross(gate.id)

        self.cue = self._sense()
        self._track_goal_hold(now)
        completion = self._completion_check(now)
        if completion is not None:
            events.append(completion)

        self.log.events.extend(events)
        self._append_sample()
        return events

    # -- internals ----------------------------------------------------------

    def _sense(self) -> HapticCue:
        reading = sense_six(self.state.position, self.world, self.haptics.max_range)
        return cue_from_ranges(
            reading,
            self.haptics.max_intensity,
            self.haptics.near_threshold,
            self.haptics.cutoff,
        )

    def _append_sample(self) -> None:
        self.log.samples.append(
            TrialSample(
                time=self.state.time,
                position=self.state.position,
                goal=self.goal,
                cue=self.cue.intensities,
                clutch_engaged=self.clutch.engaged,
            )
        )

    def _note_gate_cross(self, gate_id: int) -> None:
        order = self.scenario.gate_order
        if self._next_gate < len(order) and order[self._next_gate] == gate_id:
            self._next_gate += 1

    def _track_goal_hold(self, now: float) -> None:
        if self.scenario.task is not Task.WALL_APPROACH:
            return
        self._goal_travel += self.log.samples[-1].goal.dist_to(self.goal)
        self._goal_trail.append((now, self._goal_travel))
        horizon = now - HOLD_SECONDS
        while len(self._goal_trail) > 1 and self._goal_trail[1][0] <= horizon:
            self._goal_trail.pop(0)

    def _completion_check(self, now: float) -> TrialEvent | None:
        if self._completed:
            return None
        task = self.scenario.task
        done = False
        if task in (Task.GATE_COURSE, Task.LATERAL_GATE, Task.VERTICAL_GATE):
            done = self._next_gate >= len(self.scenario.gate_order) > 0
        elif task is Task.WALL_APPROACH:
            if now >= HOLD_SECONDS and self._goal_trail[0][0] <= now - HOLD_SECONDS:
                moved = self._goal_travel - self._goal_trail[0][1]
                done = moved < HOLD_TOLERANCE
        if not done:
            return None
        self._completed = True
        return TrialEvent(time=now, kind=EventKind.TASK_COMPLETE, payload={"task": task.value})

    @property
    def completed(self) -> bool:
        return self._completed
