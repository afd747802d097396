"""Novelty-Organizing Team of Classifiers (NOTC) with mountain-car benchmarks."""

from .envs import EnvConfig, MountainCar, make_env, random_policy_baseline
from .genome import DeParams, MlpSpec, chromosome_length, de_trial, forward, index_copy, random_chromosome
from .harness import ExperimentConfig, aggregate, run_experiment, update_decay_report
from .learner import Learner, LearnerParams
from .novelty_map import NoveltyMap, uniqueness
from .population import HallOfFame, Population, Team, actor_for, evolve

__version__ = "0.1.0"
