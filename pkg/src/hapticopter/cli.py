"""Command line entry points: batch runs, comparisons, serving, and replay."""
from __future__ import annotations

import json
import os
import sys

import click

from .gateway import load_record_file, replay_session
from .harness import (
    ExperimentConfig,
    read_results_csv,
    run_experiment,
    write_results_csv,
)
from .metrics import summarize_trial
from .pilots import PilotKind, PilotPolicy
from .stats import Center, kruskal_wallis, levene
from .world import Scenario, Task, build_scenario, load_scenario_file, load_scenario_json

POLICIES = {
    "waypoint": PilotKind.WAYPOINT,
    "noisy-depth": PilotKind.NOISY_DEPTH,
    "haptic-reactive": PilotKind.HAPTIC_REACTIVE,
}


def _resolve_scenario(source: str) -> Scenario:
    if os.path.exists(source):
        return load_scenario_file(source)
    try:
        return build_scenario(Task(source))
    except ValueError:
        raise click.BadParameter(
            f"{source!r} is neither a scenario file nor one of "
            f"{', '.join(t.value for t in Task)}"
        )


@click.group()
def main() -> None:
    """Drone teleoperation simulator with vibrotactile proximity cues."""


@main.command()
@click.option("--scenario", "scenario_src", required=True, help="Builtin task name or scenario JSON file.")
@click.option("--policy", "policy_name", type=click.Choice(sorted(POLICIES)), required=True)
@click.option("--reps", default=5, show_default=True, help="Trials to run.")
@click.option("--seed", default=0, show_default=True, help="Base seed; trial k uses seed XOR k.")
@click.option("--sigma", default=0.3, show_default=True, help="Depth-error std in meters.")
@click.option("--duration-limit", default=20.0, show_default=True, help="Per-trial time limit (s).")
@click.option("--out", "out_dir", type=click.Path(), required=True, help="Output directory.")
@click.option("--strict", is_flag=True, help="Exit with status 2 if any trial times out.")
def run(scenario_src, policy_name, reps, seed, sigma, duration_limit, out_dir, strict) -> None:
    """Fly a scripted pilot through a task and write the results table."""
    scenario = _resolve_scenario(scenario_src)
    policy = PilotPolicy(kind=POLICIES[policy_name], seed=seed, depth_sigma=sigma)
    config = ExperimentConfig(
        scenario=scenario, policy=policy, repetitions=reps, duration_limit=duration_limit
    )
    rows = run_experiment([config])
    os.makedirs(out_dir, exist_ok=True)
    out_csv = os.path.join(out_dir, "results.csv")
    write_results_csv(rows, out_csv)
    n_done = sum(r.completed for r in rows)
    n_collisions = sum(r.summary.collisions for r in rows if r.summary)
    click.echo(f"{len(rows)} trials, {n_done} completed, {n_collisions} collisions -> {out_csv}")
    if strict and any(not r.completed for r in rows):
        sys.exit(2)


def _metric_groups(rows: list[dict], metric: str) -> list[float]:
    values = [r[metric] for r in rows if r.get(metric) is not None]
    return [float(v) for v in values]


@main.command()
@click.option("--baseline", required=True, type=click.Path(exists=True))
@click.option("--treatment", required=True, type=click.Path(exists=True))
@click.option(
    "--metric",
    "metrics",
    multiple=True,
    default=("time_s", "distance_m", "collisions"),
    show_default=True,
)
@click.option(
    "--center",
    type=click.Choice(["mean", "median"]),
    default="mean",
    show_default=True,
    help="Levene centering.",
)
def compare(baseline, treatment, metrics, center) -> None:
    """Run the rank and variance tests between two results tables."""
    base_rows = read_results_csv(baseline)
    treat_rows = read_results_csv(treatment)
    report = []
    for metric in metrics:
        groups = [_metric_groups(base_rows, metric), _metric_groups(treat_rows, metric)]
        if any(len(g) < 2 for g in groups):
            report.append({"metric": metric, "error": "not enough observations"})
            continue
        kw = kruskal_wallis(groups)
        lv = levene(groups, Center(center))
        report.append(
            {
                "metric": metric,
                "tests": [
                    {
                        "test": "kruskal_wallis",
                        "statistic": kw.statistic,
                        "dof": kw.dof,
                        "p": kw.p_value,
                    },
                    {
                        "test": "levene",
                        "statistic": lv.statistic,
                        "dof": list(lv.dof),
                        "p": lv.p_value,
                    },
                ],
            }
        )
    click.echo(json.dumps(report, indent=2))


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--scenario", "scenario_src", default="wall_approach", show_default=True)
@click.option(
    "--record-dir",
    default=None,
    help="Directory for session records (defaults to $HAPTICOPTER_LOG_DIR when set).",
)
@click.option("--ui", "ui_dir", default=None, type=click.Path(), help="Static cockpit build to serve at /.")
def serve(port, host, scenario_src, record_dir, ui_dir) -> None:
    """Serve the live gateway WebSocket (and optionally the browser cockpit)."""
    from .server import serve as run_server

    scenario = _resolve_scenario(scenario_src)
    run_server(scenario, host=host, port=port, record_dir=record_dir, ui_dir=ui_dir)


@main.command()
@click.argument("record", type=click.Path(exists=True))
@click.option("--out", "out_csv", required=True, type=click.Path(), help="Summary row CSV.")
@click.option("--trajectory", default=None, type=click.Path(), help="Also dump per-tick samples.")
def replay(record, out_csv, trajectory) -> None:
    """Re-run a recorded live session offline and summarize it."""
    import csv as csv_mod

    from .harness import TrialRow, write_results_csv

    rec = load_record_file(record)
    log = replay_session(rec)
    scenario = load_scenario_json(rec.scenario_doc)
    summary = summarize_trial(log, scenario)
    row = TrialRow(
        trial=0,
        task=scenario.task.value,
        policy="live",
        seed=rec.settings.seed,
        completed=summary.completed,
        summary=summary,
    )
    write_results_csv([row], out_csv)
    if trajectory:
        with open(trajectory, "w", newline="", encoding="utf-8") as fh:
            writer = csv_mod.writer(fh)
            writer.writerow(["time", "x", "y", "z", "goal_x", "goal_y", "goal_z", "clutch"])
            for s in log.samples:
                writer.writerow(
                    [s.time, s.position.x, s.position.y, s.position.z,
                     s.goal.x, s.goal.y, s.goal.z, int(s.clutch_engaged)]
                )
    click.echo(
        f"replayed {len(log.samples)} samples: completed={summary.completed} "
        f"time={summary.completion_time:.2f}s collisions={summary.collisions} -> {out_csv}"
    )


if __name__ == "__main__":
    main()
