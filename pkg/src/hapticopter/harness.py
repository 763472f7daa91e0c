"""Batch experiment runner: scripted pilots flown through the task worlds.

Each trial is a fully closed loop (pilot -> mapping -> PID -> dynamics ->
sensing -> cue -> pilot) at the fixed tick rate, deterministic per
(config, trial index). Per-trial noise seeds derive as base-seed XOR trial
index, so two policies sharing a base seed see identical noise draws.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum

from .dynamics import SimConfig
from .geometry import InputDomainError
from .metrics import MetricsSummary, summarize_trial
from .pilots import Pilot, PilotPolicy
from .session import SimSession
from .trial import TrialLog
from .world import Scenario

DEFAULT_DURATION_LIMIT = 20.0  # s of simulated time before a trial times out


class TrialOutcome(str, Enum):
    FINISHED = "finished"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    policy: PilotPolicy
    repetitions: int = 1
    dt: float = SimConfig().dt
    duration_limit: float = DEFAULT_DURATION_LIMIT

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise InputDomainError("repetitions must be >= 1")
        if self.duration_limit <= 0:
            raise InputDomainError("duration_limit must be positive")


@dataclass(frozen=True)
class TrialResult:
    log: TrialLog
    completed: bool
    reason: TrialOutcome

    def __post_init__(self) -> None:
        assert not self.completed or self.reason is TrialOutcome.FINISHED


def run_trial(config: ExperimentConfig, trial_index: int) -> TrialResult:
    trial_seed = config.policy.seed ^ trial_index
    session = SimSession(
        config.scenario,
        config=SimConfig(dt=config.dt),
        meta={
            "policy": config.policy.kind.value,
            "seed": trial_seed,
            "trial": trial_index,
            "duration_limit": config.duration_limit,
        },
    )
    pilot = Pilot(
        config.policy,
        config.scenario,
        trial_seed,
        scale=session.mapping.scale,
        dt=config.dt,
    )
    session.apply_clutch(True)
    max_ticks = int(math.ceil(config.duration_limit / config.dt))
    for _ in range(max_ticks):
        hand = pilot.step(session.state, session.cue)
        session.apply_hand(hand)
        session.tick()
        if session.completed:
            break
    reason = TrialOutcome.FINISHED if session.completed else TrialOutcome.TIMEOUT
    return TrialResult(log=session.log, completed=session.completed, reason=reason)


@dataclass(frozen=True)
class TrialRow:
    trial: int
    task: str
    policy: str
    seed: int
    completed: bool
    summary: MetricsSummary | None
    error: str = ""


def run_experiment(configs: list[ExperimentConfig]) -> list[TrialRow]:
    """Run every config for its repetition count, in deterministic row order.

    A failing trial keeps its row (with the error recorded) without stopping
    the rest of the batch.
    """
    if not configs:
        raise InputDomainError("no experiment configs given")
    rows: list[TrialRow] = []
    for config in configs:
        for trial_index in range(config.repetitions):
            seed = config.policy.seed ^ trial_index
            base = dict(
                trial=trial_index,
                task=config.scenario.task.value,
                policy=config.policy.kind.value,
                seed=seed,
            )
            try:
                result = run_trial(config, trial_index)
                summary = summarize_trial(result.log, config.scenario)
                rows.append(TrialRow(completed=result.completed, summary=summary, **base))
            except Exception as exc:  # noqa: BLE001 - keep the batch alive per cell
                rows.append(TrialRow(completed=False, summary=None, error=str(exc), **base))
    return rows


RESULTS_HEADER = [
    "trial", "task", "policy", "seed", "completed",
    "time_s", "distance_m", "collisions", "min_wall_dist_m",
    "cross_x", "cross_y", "cross_z",
]


def write_results_csv(rows: list[TrialRow], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_HEADER)
        for row in rows:
            s = row.summary
            cross = s.crossing_points[0] if s and s.crossing_points else None
            writer.writerow([
                row.trial,
                row.task,
                row.policy,
                row.seed,
                "true" if row.completed else "false",
                _fmt(s.completion_time) if s else "",
                _fmt(s.path_length) if s else "",
                s.collisions if s else "",
                _fmt(s.min_wall_distance) if s and s.min_wall_distance is not None else "",
                _fmt(cross.x) if cross else "",
                _fmt(cross.y) if cross else "",
                _fmt(cross.z) if cross else "",
            ])


def _fmt(value: float) -> str:
    return repr(float(value))


def read_results_csv(path: str) -> list[dict]:
    """Rows as dicts with numeric fields parsed (empty cells become None)."""
    out = []
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RESULTS_HEADER:
            raise InputDomainError(
                f"unexpected results header {reader.fieldnames}, want {RESULTS_HEADER}"
            )
        for record in reader:
            row: dict = dict(record)
            row["trial"] = int(record["trial"])
            row["seed"] = int(record["seed"])
            row["completed"] = record["completed"] == "true"
            for key in ("time_s", "distance_m", "min_wall_dist_m", "cross_x", "cross_y", "cross_z"):
                row[key] = float(record[key]) if record[key] else None
            row["collisions"] = int(record["collisions"]) if record["collisions"] else None
            out.append(row)
    return out
