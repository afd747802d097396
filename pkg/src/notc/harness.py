"""Seeded multi-run experiments, curve aggregation and CSV/config I/O.

Run ``r`` draws all of its randomness from ``SeedSequence(base_seed + r)``,
spawned into two streams in a fixed order: the first feeds the learner
(initial population, team draws, evolution) and the second the
environment's observation noise. Runs therefore reproduce individually.
"""

import csv
import io
import logging
from dataclasses import asdict, dataclass, fields, replace
from typing import NamedTuple, Optional

import numpy as np

from .envs import ENV_NAMES, make_env
from .genome import DeParams, MlpSpec
from .learner import Learner, LearnerParams

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "TrialRecord",
    "CurvePoint",
    "run_experiment",
    "run_single",
    "aggregate",
    "update_decay_report",
    "write_records",
    "read_records",
    "write_curve",
    "write_updates",
    "load_config",
    "RECORD_HEADER",
    "CURVE_HEADER",
]

log = logging.getLogger(__name__)

RECORD_HEADER = ["run_id", "trial", "steps", "accumulated_reward", "phase", "map_updates_delta"]
CURVE_HEADER = ["window_index", "mean_best_reward", "std_best_reward"]
UPDATES_HEADER = ["window_index", "map_updates"]


class ConfigError(ValueError):
    """Invalid experiment configuration; ``key`` names the offending setting."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class ExperimentConfig:
    env: str = "mc"
    runs: int = 30
    trials: int = 20000
    window: int = 100
    seed: int = 0
    start_trial: int = 0
    cells: int = 10
    best: int = 10
    novel: int = 10
    hidden: int = 10
    eta: float = 0.1
    gamma: float = 0.99
    iota: int = 10
    cr: float = 0.2
    f_low: float = 0.0
    f_high: float = 2.0
    noise_pos_sigma: Optional[float] = None
    noise_vel_sigma: Optional[float] = None
    weather_period: Optional[int] = None
    step_cap: Optional[int] = None

    def validate(self):
        if self.env not in ENV_NAMES:
            raise ConfigError("env", f"unknown environment {self.env!r} (expected {', '.join(ENV_NAMES)})")
        for key in ("runs", "trials", "window", "cells", "best", "novel", "hidden", "iota"):
            if getattr(self, key) < 1:
                raise ConfigError(key, "must be a positive integer")
        if self.best < 2:
            raise ConfigError("best", "must be at least 2")
        if self.window > self.trials:
            raise ConfigError("window", "must not exceed trials")
        if self.seed < 0:
            raise ConfigError("seed", "must be nonnegative")
        if self.start_trial < 0:
            raise ConfigError("start_trial", "must be nonnegative")
        for key, build in (("learner", self.learner_params), ("env", lambda: make_env(self.env, **self.env_overrides()))):
            try:
                build()
            except ValueError as exc:
                raise ConfigError(key, str(exc)) from None
        return self

    def env_overrides(self):
        return {
            "noise_pos_sigma": self.noise_pos_sigma,
            "noise_vel_sigma": self.noise_vel_sigma,
            "weather_period": self.weather_period,
            "step_cap": self.step_cap,
        }

    def learner_params(self):
        return LearnerParams(
            eta=self.eta,
            gamma=self.gamma,
            iota=self.iota,
            map_size=self.cells,
            n_best=self.best,
            n_novel=self.novel,
            de=DeParams(self.cr, self.f_low, self.f_high),
            spec=MlpSpec(2, self.hidden, 1),
        )


class TrialRecord(NamedTuple):
    run_id: int
    trial: int
    steps: int
    accumulated_reward: float
    phase: str
    map_updates_delta: int
    v_max: float = float("nan")


class CurvePoint(NamedTuple):
    window_index: int
    mean_best_reward: float
    std_best_reward: float


def run_single(config, run_id):
    """Execute one run; returns ``(records, learner, env)``."""
    learner_seq, env_seq = np.random.SeedSequence(config.seed + run_id).spawn(2)
    env = make_env(config.env, np.random.default_rng(env_seq), **config.env_overrides())
    learner = Learner(
        config.learner_params(),
        np.random.default_rng(learner_seq),
        env.config.action_low,
        env.config.action_high,
    )
    records = []
    for trial in range(config.start_trial, config.start_trial + config.trials):
        res = learner.run_trial(env, trial)
        records.append(
            TrialRecord(run_id, trial, res.steps, res.accumulated_reward, res.phase, res.map_updates, res.v_max)
        )
    return records, learner, env


def run_experiment(config, run_ids=None):
    """All runs of an experiment (or the subset ``run_ids``), sorted by (run, trial)."""
    config.validate()
    run_ids = range(config.runs) if run_ids is None else run_ids
    records = []
    for run_id in run_ids:
        run_records, learner, _ = run_single(config, run_id)
        log.info(
            "run %d: best %.0f in last window, %d map updates",
            run_id,
            max(r.accumulated_reward for r in run_records[-config.window :]),
            learner.map.update_count,
        )
        records.extend(run_records)
    records.sort(key=lambda r: (r.run_id, r.trial))
    return records


def _by_run(records):
    if not records:
        raise ValueError("no records to aggregate")
    runs = {}
    for r in records:
        runs.setdefault(r.run_id, []).append(r)
    for rows in runs.values():
        rows.sort(key=lambda r: r.trial)
    return [runs[k] for k in sorted(runs)]


def window_maxima(records, window):
    """Array ``(runs, windows)`` of the best reward in each full window."""
    if window < 1:
        raise ValueError("window must be positive")
    runs = _by_run(records)
    n_windows = min(len(rows) for rows in runs) // window
    rewards = np.array([[r.accumulated_reward for r in rows[: n_windows * window]] for rows in runs])
    return rewards.reshape(len(runs), n_windows, window).max(axis=2)


def aggregate(records, window):
    """Mean and population std across runs of the per-window best reward.

    Windows are consecutive and non-overlapping; a partial final window is
    dropped.
    """
    maxima = window_maxima(records, window)
    mean = maxima.mean(axis=0)
    std = maxima.std(axis=0)
    return [CurvePoint(i, float(m), float(s)) for i, (m, s) in enumerate(zip(mean, std))]


def update_decay_report(records, window=100):
    """Novelty Map updates per window, summed over runs.

    Unlike ``aggregate`` the partial last window is kept, so the total equals
    the summed final update counts.
    """
    runs = _by_run(records)
    n_windows = -(-max(len(rows) for rows in runs) // window)
    totals = [0] * n_windows
    for rows in runs:
        for i, r in enumerate(rows):
            totals[i // window] += int(r.map_updates_delta)
    return totals


def _num(x):
    return format(x, ".12g")


def write_records(records, fh, debug=False):
    fh.write(",".join(RECORD_HEADER + (["v_max"] if debug else [])) + "\n")
    for r in records:
        row = [str(r.run_id), str(r.trial), str(r.steps), _num(r.accumulated_reward), r.phase, str(r.map_updates_delta)]
        if debug:
            row.append(_num(r.v_max))
        fh.write(",".join(row) + "\n")


def read_records(fh):
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or header[: len(RECORD_HEADER)] != RECORD_HEADER:
        raise ValueError(f"records header must start with {','.join(RECORD_HEADER)}")
    has_vmax = len(header) > len(RECORD_HEADER) and header[len(RECORD_HEADER)] == "v_max"
    out = []
    for row in reader:
        if not row:
            continue
        out.append(
            TrialRecord(
                int(row[0]), int(row[1]), int(row[2]), float(row[3]), row[4], int(row[5]),
                float(row[6]) if has_vmax else float("nan"),
            )
        )
    return out


def write_curve(points, fh):
    fh.write(",".join(CURVE_HEADER) + "\n")
    for p in points:
        fh.write(f"{p.window_index},{_num(p.mean_best_reward)},{_num(p.std_best_reward)}\n")


def write_updates(totals, fh):
    fh.write(",".join(UPDATES_HEADER) + "\n")
    for i, n in enumerate(totals):
        fh.write(f"{i},{n}\n")


def records_csv(records, debug=False):
    buf = io.StringIO()
    write_records(records, buf, debug)
    return buf.getvalue()


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def coerce(key, value):
    """Convert a text setting to the type of ``ExperimentConfig.<key>``."""
    if key not in _FIELD_TYPES:
        raise ConfigError(key, "unknown setting")
    kind = _FIELD_TYPES[key]
    if value is None or not isinstance(value, str):
        return value
    try:
        if kind is str:
            return value
        if kind in (int, Optional[int]):
            return int(value)
        return float(value)
    except ValueError:
        raise ConfigError(key, f"cannot parse {value!r}") from None


def load_config(text, base=None):
    """Apply flat ``key=value`` lines (``#`` comments allowed) on top of ``base``."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line, f"line {lineno} is not key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        values[key] = coerce(key, value)
    return replace(base or ExperimentConfig(), **values)


def config_text(config):
    return "".join(f"{k}={v}\n" for k, v in asdict(config).items() if v is not None)
