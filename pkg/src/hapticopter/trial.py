"""Timestamped trial logs: the common record produced by live sessions and
scripted trials alike, and consumed by the metrics code."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple

from .geometry import Vec3


class EventKind(str, Enum):
    COLLISION = "collision"
    GATE_CROSS = "gate_cross"
    TASK_COMPLETE = "task_complete"
    STALE_INPUT = "stale_input"


class TrialSample(NamedTuple):
    time: float
    position: Vec3
    goal: Vec3
    cue: tuple[float, float, float, float, float, float]
    clutch_engaged: bool


class TrialEvent(NamedTuple):
    time: float
    kind: EventKind
    payload: dict


@dataclass
class TrialLog:
    samples: list[TrialSample] = field(default_factory=list)
    events: list[TrialEvent] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def completion_event(self) -> TrialEvent | None:
        for ev in self.events:
            if ev.kind is EventKind.TASK_COMPLETE:
                return ev
        return None

    def events_of(self, kind: EventKind) -> list[TrialEvent]:
        return [ev for ev in self.events if ev.kind is kind]
