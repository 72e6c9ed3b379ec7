"""The commands behind the ``uavmec`` entry point: train, eval, validate and
sweep. Each command reads its settings first, so a bad config leaves no
output behind, and writes only inside its output directory.
"""

import contextlib
import csv
import json
import logging
from pathlib import Path
from typing import Dict, List, NamedTuple

import numpy

import uavmec
from uavmec.agent import (
    METRICS_COLUMNS,
    RedqAgent,
    scheme_policy,
    scheme_world,
    train,
    training_scheme,
)
from uavmec.environment import Environment
from uavmec.exceptions import ConfigException
from uavmec.load_csv import MBIT, default_config, format_value, load
from uavmec.mdp import action_dim, dump_trajectory, episode, observation_dim
from uavmec.utils import make_rng
from uavmec.validation import SUITES, format_report, run_all

CHECKPOINT_FILENAME = "checkpoint.npz"
METRICS_FILENAME = "metrics.csv"
SUMMARY_FILENAME = "summary.json"
SWEEP_COLUMNS = (
    "axis",
    "value",
    "scheme",
    "energy_mean",
    "energy_std",
    "outage_mean",
    "final_battery_mean",
)


class TrainResult(NamedTuple):
    agent: RedqAgent
    rows: List[dict]
    checkpoint: Path


def resolve_config(config_path=None, **overrides):
    """Load a config file (or the full defaults) and apply the overrides
    that are not None.

    Raises:
        ConfigException: if the file or an override is not valid.
    """
    config = default_config() if config_path is None else load(config_path)
    changes = {key: value for key, value in overrides.items() if value is not None}
    return config.override(**changes).validate()


@contextlib.contextmanager
def metrics_writer(filepath):
    """Open metrics.csv and yield a function that appends one row to it.

    Each row is flushed as it is written, so the file keeps every finished
    episode even if training stops early.
    """
    with open(filepath, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=METRICS_COLUMNS)
        writer.writeheader()
        f.flush()

        def write_row(row):
            writer.writerow(row)
            f.flush()

        yield write_row


def train_scheme(config, out_dir):
    """Train the agent of the configured scheme and save its outputs.

    Args:
        config (Config): The resolved settings.
        out_dir (Path): Directory for the checkpoint, metrics and snapshot.

    Returns:
        TrainResult: the agent, its metrics rows and checkpoint path.
    """
    run = config.run()
    scheme = training_scheme(run.scheme)
    env = Environment(scheme_world(config.world(), scheme))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config.snapshot(out_dir)
    logging.info(f"Training {scheme} for {run.total_steps} steps with seed {run.seed}.")
    rng = make_rng(run.seed, "train")
    with metrics_writer(out_dir / METRICS_FILENAME) as write_row:
        agent, rows = train(env, config.agent(), run, rng, scheme, write_row)
    logging.info(f"Wrote {len(rows)} episodes to {out_dir / METRICS_FILENAME}.")
    checkpoint = agent.save(out_dir / CHECKPOINT_FILENAME, scheme=scheme, seed=run.seed)
    return TrainResult(agent, rows, checkpoint)


def evaluate(env, agent, scheme, episodes, rng):
    """Roll out deterministic evaluation episodes of a scheme.

    Returns:
        list: One EpisodeResult per episode.
    """
    policy = scheme_policy(scheme, agent, env.n_users)
    return [episode(env, policy, rng) for _ in range(episodes)]


def summarise_evaluation(scheme, results) -> Dict[str, object]:
    """Mean and spread of the episode summaries of an evaluation."""
    summaries = [result.summary for result in results]
    energy = numpy.array([s.objective for s in summaries])
    outage = numpy.array([s.outage_frac for s in summaries])
    return {
        "scheme": scheme,
        "episodes": len(summaries),
        "energy_mean": float(numpy.mean(energy)),
        "energy_std": float(numpy.std(energy)),
        "outage_mean": float(numpy.mean(outage)),
        "outage_std": float(numpy.std(outage)),
        "speed_violation_mean": float(
            numpy.mean([s.speed_violation_frac for s in summaries])
        ),
        "final_battery_mean": float(numpy.mean([s.final_battery for s in summaries])),
        "reward_mean": float(numpy.mean([s.total_reward for s in summaries])),
    }


def evaluate_scheme(config, agent, out_dir):
    """Evaluate an agent under the configured scheme and save the outputs.

    Returns:
        dict: the evaluation summary, also written to summary.json.
    """
    run = config.run()
    env = Environment(scheme_world(config.world(), run.scheme))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config.snapshot(out_dir)
    rng = make_rng(run.seed, "eval")
    results = evaluate(env, agent, run.scheme, run.eval_episodes, rng)
    for i, result in enumerate(results, start=1):
        filepath = out_dir / f"trajectory_{run.scheme}_{i}.jsonl"
        dump_trajectory(result.records, filepath)
    summary = summarise_evaluation(run.scheme, results)
    with open(out_dir / SUMMARY_FILENAME, "w") as f:
        json.dump(summary, f, indent=2)
    logging.info(f"Wrote {out_dir / SUMMARY_FILENAME}.")
    return summary


def load_agent(checkpoint, config):
    """Restore the agent a checkpoint holds for the configured scheme.

    Raises:
        CheckpointException: if the checkpoint was trained for another
                             world, network or scheme.
    """
    n_users = config["n_users"]
    return RedqAgent.load(
        checkpoint,
        config.agent(),
        observation_dim(n_users),
        action_dim(n_users),
        make_rng(config["seed"], "agent"),
        scheme=training_scheme(config["scheme"]),
    )


def cmd_train(config_path=None, seed=None, scheme=None, out_dir=None):
    """Train an agent and write checkpoint.npz, metrics.csv and
    config_snapshot.csv.

    Raises:
        ConfigException: if the settings are not valid.
    """
    config = resolve_config(config_path, seed=seed, scheme=scheme, out_dir=out_dir)
    return train_scheme(config, config["out_dir"])


def cmd_eval(
    checkpoint, config_path=None, scheme=None, episodes=None, seed=None, out_dir=None
):
    """Evaluate a checkpoint and write summary.json and trajectory dumps.

    Raises:
        ConfigException: if the settings are not valid or episodes is 0.
        CheckpointException: if the checkpoint does not fit the settings.
    """
    if episodes is not None and episodes < 1:
        raise ConfigException(f"Need at least one evaluation episode, got {episodes}.")
    config = resolve_config(
        config_path, seed=seed, scheme=scheme, eval_episodes=episodes, out_dir=out_dir
    )
    agent = load_agent(checkpoint, config)
    return evaluate_scheme(config, agent, config["out_dir"])


def cmd_validate(seed=0, suites=SUITES):
    """Run the self-checks and print a report.

    Returns:
        bool: True if every check passed.
    """
    results = run_all(seed, suites)
    print(format_report(results))
    failed = [result for result in results if not result.passed]
    for result in failed:
        logging.error(f"Check failed: {result.suite} {result.name} ({result.value:g}).")
    return not failed


def sweep_points(config, axis):
    """The settings changes of each point of a sweep, sorted by axis value.

    Returns:
        list: (value, overrides) pairs.
    """
    run = config.run()
    if axis == uavmec.USERS:
        points = [(v, {"n_users": v}) for v in sorted(run.users_sweep)]
    elif axis == uavmec.SIGMA:
        points = [(v, {"jitter_sigma": v}) for v in sorted(run.sigma_sweep)]
    elif axis == uavmec.TASK_SIZE:
        points = [
            ((lo, hi), {"data_min": lo * MBIT, "data_max": hi * MBIT})
            for lo, hi in sorted(run.task_size_sweep)
        ]
    else:
        raise ConfigException(
            f"Unknown sweep axis {axis}; expected one of {uavmec.AXES}."
        )
    if not points:
        raise ConfigException(f"The {axis} sweep has no values.")
    return points


def _value_label(axis, value):
    if axis == uavmec.TASK_SIZE:
        return format_value("task_size_sweep", (value,))
    return str(value)


def cmd_sweep(
    config_path=None, axis=uavmec.SIGMA, seed=None, out_dir=None, schemes=None
):
    """Train and evaluate every scheme at every point of one sweep axis.

    Schemes sharing a trained agent (random_move uses the proposed one) train
    it once per point.

    Returns:
        Path: the sweep_<axis>.csv file, one row per (value, scheme).
    """
    config = resolve_config(config_path, seed=seed, out_dir=out_dir)
    points = sweep_points(config, axis)
    schemes = tuple(schemes or config.run().sweep_schemes)
    root = Path(config["out_dir"])
    rows = []
    for value, changes in points:
        label = _value_label(axis, value)
        point_dir = root / f"{axis}_{label}"
        agents: Dict[str, RedqAgent] = {}
        for scheme in schemes:
            trained = training_scheme(scheme)
            if trained not in agents:
                point = config.override(scheme=trained, **changes)
                agents[trained] = train_scheme(point, point_dir / trained).agent
            point = config.override(scheme=scheme, **changes)
            eval_dir = point_dir / f"eval_{scheme}"
            summary = evaluate_scheme(point, agents[trained], eval_dir)
            rows.append(
                {
                    "axis": axis,
                    "value": label,
                    "scheme": scheme,
                    "energy_mean": summary["energy_mean"],
                    "energy_std": summary["energy_std"],
                    "outage_mean": summary["outage_mean"],
                    "final_battery_mean": summary["final_battery_mean"],
                }
            )
    root.mkdir(parents=True, exist_ok=True)
    filepath = root / f"sweep_{axis}.csv"
    with open(filepath, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=SWEEP_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    logging.info(f"Wrote {len(rows)} sweep rows to {filepath}.")
    return filepath
