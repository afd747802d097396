"""Continuous-action mountain car with noisy and unstable-weather variants.

Dynamics per step, with the action clamped to ``[-1, 1]``::

    vel' = clip(vel + a * 0.001 + cos(3 * pos) * (-0.0025), -v_max, v_max)
    pos' = pos + vel'
    if vel' < 0 and pos' <= -1.2:  pos', vel' = -1.2, 0

Reaching ``pos' >= 0.6`` ends the trial with reward 0, every other step pays
-1, and the trial is cut after ``step_cap`` steps. Observation noise is added
only to what the agent reads; the underlying state is never perturbed.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from numba import njit

__all__ = [
    "EnvConfig",
    "MountainCar",
    "MountainCarState",
    "StepResult",
    "make_env",
    "random_policy_baseline",
    "ENV_NAMES",
]

POS_MIN = -1.2
POS_GOAL = 0.6
START_POS = -0.5
START_VEL = 0.0
FORCE = 0.001
GRAVITY = -0.0025

ENV_NAMES = ("mc", "mc-noisy", "mc-weather")


@dataclass(frozen=True)
class EnvConfig:
    noise_pos_sigma: float = 0.0
    noise_vel_sigma: float = 0.0
    weather_period: Optional[int] = None
    reduced_v_max: float = 0.04
    base_v_max: float = 0.07
    step_cap: int = 1000
    action_low: float = -1.0
    action_high: float = 1.0

    def __post_init__(self):
        if self.noise_pos_sigma < 0 or self.noise_vel_sigma < 0:
            raise ValueError("noise sigmas must be nonnegative")
        if not self.reduced_v_max < self.base_v_max:
            raise ValueError("reduced_v_max must be below base_v_max")
        if self.step_cap < 1:
            raise ValueError("step_cap must be positive")
        if self.weather_period is not None and self.weather_period < 1:
            raise ValueError("weather_period must be positive")
        if self.action_low > self.action_high:
            raise ValueError("empty action range")

    @property
    def noisy(self):
        return self.noise_pos_sigma > 0 or self.noise_vel_sigma > 0


class MountainCarState(NamedTuple):
    pos: float
    vel: float
    step_index: int


class StepResult(NamedTuple):
    observation: np.ndarray
    reward: float
    terminal: bool


@njit(cache=True)
def _dynamics(pos, vel, a, v_max):
    vel = vel + a * FORCE + math.cos(3.0 * pos) * GRAVITY
    if vel > v_max:
        vel = v_max
    elif vel < -v_max:
        vel = -v_max
    pos = pos + vel
    if vel < 0.0 and pos <= POS_MIN:
        pos = POS_MIN
        vel = 0.0
    return pos, vel


def make_env(name, rng=None, **overrides):
    """Build one of ``mc``, ``mc-noisy`` or ``mc-weather`` with optional overrides."""
    defaults = {
        "mc": {},
        "mc-noisy": {"noise_pos_sigma": 0.06, "noise_vel_sigma": 0.009},
        "mc-weather": {"weather_period": 10000},
    }
    if name not in defaults:
        raise ValueError(f"unknown environment {name!r}; expected one of {', '.join(ENV_NAMES)}")
    params = dict(defaults[name])
    params.update({k: v for k, v in overrides.items() if v is not None})
    return MountainCar(EnvConfig(**params), rng)


class MountainCar:
    """Mountain car environment.

    Noise for observation reads is pre-drawn in blocks at reset so a whole
    trial can run inside a compiled loop while consuming exactly the same
    random numbers as step-by-step use.
    """

    def __init__(self, config=None, rng=None):
        self.config = config or EnvConfig()
        self.rng = rng if rng is not None else np.random.default_rng()
        self.observation_low = np.array([POS_MIN, -self.config.base_v_max])
        self.observation_high = np.array([POS_GOAL, self.config.base_v_max])
        self.v_max = self.config.base_v_max
        self.pos = START_POS
        self.vel = START_VEL
        self.step_index = 0
        self.done = True
        self._sigmas = np.array([self.config.noise_pos_sigma, self.config.noise_vel_sigma])
        self._noise = np.zeros((self.config.step_cap + 1, 2))
        self._cursor = 0

    @property
    def state(self):
        return MountainCarState(self.pos, self.vel, self.step_index)

    def v_max_for(self, trial_index):
        period = self.config.weather_period
        if period is not None and (trial_index // period) % 2 == 1:
            return self.config.reduced_v_max
        return self.config.base_v_max

    def normalize(self, observation):
        """Rescale an observation linearly so the declared ranges map to [0, 1]."""
        return (np.asarray(observation) - self.observation_low) / (self.observation_high - self.observation_low)

    def _draw_noise(self, rows):
        if self.config.noisy:
            return self.rng.standard_normal((rows, 2)) * self._sigmas
        return np.zeros((rows, 2))

    def _ensure_noise(self, reads):
        """Make sure ``reads`` more noise rows are available from the cursor."""
        missing = self._cursor + reads - self._noise.shape[0]
        if missing > 0:
            self._noise = np.concatenate([self._noise, self._draw_noise(max(missing, self.config.step_cap + 1))])

    def observe(self):
        """Read the state, with fresh observation noise on every read."""
        self._ensure_noise(1)
        row = self._noise[self._cursor]
        self._cursor += 1
        return np.array([self.pos + row[0], self.vel + row[1]])

    def reset(self, trial_index=0):
        self.v_max = self.v_max_for(trial_index)
        self.pos = START_POS
        self.vel = START_VEL
        self.step_index = 0
        self.done = False
        if self.config.noisy:
            self._noise = self._draw_noise(self.config.step_cap + 1)
        self._cursor = 0
        return self.observe()

    def clamp_action(self, action):
        return min(max(float(action), self.config.action_low), self.config.action_high)

    def step(self, action):
        if self.done:
            raise RuntimeError("step() on a terminated trial; call reset() first")
        a = self.clamp_action(action)
        self.pos, self.vel = _dynamics(self.pos, self.vel, a, self.v_max)
        self.step_index += 1
        if self.pos >= POS_GOAL:
            reward, terminal = 0.0, True
        else:
            reward, terminal = -1.0, self.step_index >= self.config.step_cap
        self.done = terminal
        return StepResult(self.observe(), reward, terminal)


def random_policy_baseline(env, n_trials, rng, policy=None):
    """Mean accumulated reward of a policy over ``n_trials`` trials.

    ``policy`` maps an observation to an action; by default actions are drawn
    uniformly from the action range.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    lo, hi = env.config.action_low, env.config.action_high
    totals = []
    for trial in range(n_trials):
        obs = env.reset(trial)
        total = 0.0
        while True:
            action = rng.uniform(lo, hi) if policy is None else policy(obs)
            obs, reward, terminal = env.step(action)
            total += reward
            if terminal:
                break
        totals.append(total)
    return float(np.mean(totals))
