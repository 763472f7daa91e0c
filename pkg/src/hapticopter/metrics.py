"""Per-trial metrics and the tactor-recognition confusion matrix."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .geometry import InputDomainError, Vec3
from .sensing import Direction
from .trial import EventKind, TrialLog
from .world import Scenario, Task


@dataclass(frozen=True)
class MetricsSummary:
    completion_time: float       # s; duration limit when the task never finished
    path_length: float           # m
    collisions: int
    min_wall_distance: float | None      # m, wall-approach runs only
    crossing_points: tuple[Vec3, ...]    # through-opening gate crossings
    completed: bool


def summarize_trial(log: TrialLog, scenario: Scenario) -> MetricsSummary:
    """Reduce a trial log to the evaluation metrics.

    Completion time comes from the task-complete event; without one the trial
    is flagged incomplete and charged the full duration limit. Collision count
    is per contact onset, so scraping along one wall counts once.
    """
    if not log.samples:
        raise InputDomainError("trial log has no samples")

    start = log.samples[0].time
    done = log.completion_event()
    if done is not None:
        completion_time = done.time - start
        completed = True
    else:
        completion_time = float(log.meta.get("duration_limit", log.samples[-1].time - start))
        completed = False

    path_length = 0.0
    prev = log.samples[0].position
    for sample in log.samples[1:]:
        path_length += prev.dist_to(sample.position)
        prev = sample.position

    collisions = len(log.events_of(EventKind.COLLISION))

    min_wall = None
    if scenario.task is Task.WALL_APPROACH and scenario.target_wall is not None:
        wall = scenario.world.obstacles[scenario.target_wall]
        min_wall = min(wall.distance_to(s.position) for s in log.samples)

    crossings = tuple(
        Vec3(*ev.payload["point"]) for ev in log.events_of(EventKind.GATE_CROSS)
    )
    return MetricsSummary(
        completion_time=completion_time,
        path_length=path_length,
        collisions=collisions,
        min_wall_distance=min_wall,
        crossing_points=crossings,
        completed=completed,
    )


# Confusion rows/columns follow the tactor report order used on the bench
# sheet: back, front, left, right, up, down.
CONFUSION_ORDER = (
    Direction.BACK,
    Direction.FRONT,
    Direction.LEFT,
    Direction.RIGHT,
    Direction.UP,
    Direction.DOWN,
)


@dataclass(frozen=True)
class ConfusionMatrix:
    rows: tuple[tuple[float, ...], ...]   # row percentages in CONFUSION_ORDER
    accuracy: float                       # percent correct overall
    empty_rows: tuple[Direction, ...]     # directions never presented (all-zero rows)

    def row_for(self, actual: Direction) -> tuple[float, ...]:
        return self.rows[CONFUSION_ORDER.index(actual)]


def confusion_matrix(trials: Iterable[tuple[Direction, Direction]]) -> ConfusionMatrix:
    """Row-percentage confusion matrix of (actual, reported) direction pairs.

    Each row sums to 100 for directions that were presented; never-presented
    directions yield an all-zero row and are flagged in `empty_rows`.
    """
    counts = [[0] * 6 for _ in range(6)]
    total = 0
    correct = 0
    for actual, reported in trials:
        a = CONFUSION_ORDER.index(Direction(actual))
        r = CONFUSION_ORDER.index(Direction(reported))
        counts[a][r] += 1
        total += 1
        if actual == reported:
            correct += 1
    if total == 0:
        raise InputDomainError("no trials to tabulate")
    rows = []
    empty = []
    for a in range(6):
        n = sum(counts[a])
        if n == 0:
            empty.append(CONFUSION_ORDER[a])
            rows.append((0.0,) * 6)
        else:
            rows.append(tuple(100.0 * c / n for c in counts[a]))
    return ConfusionMatrix(
        rows=tuple(rows),
        accuracy=100.0 * correct / total,
        empty_rows=tuple(empty),
    )
