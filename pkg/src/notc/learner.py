"""NOTC control loop.

Each step the Novelty Map picks the winner cell, the trial's team supplies
that cell's actor, and the actor of the previous step has its fitness moved
toward ``reward + gamma * max(fitness in the winner cell)`` by the
Widrow-Hoff rule. Finished teams are offered to the hall of fame, and every
``subpop_size * iota`` learning trials the population evolves, after which
each hall-of-fame team gets one replay trial.

Two routes drive a trial: ``act``/``end_trial`` work one step at a time with
any environment, and ``run_trial`` runs a whole mountain-car trial in one
compiled loop built from the same kernels. Both consume identical random
numbers and give bit-identical results.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from numba import njit

from .envs import MountainCar, _dynamics, POS_GOAL
from .genome import DeParams, MlpSpec, _forward
from .novelty_map import NoveltyMap, _observe
from .population import DONT_CARE, HallOfFame, Population, Team, actor_for, evolve, replay_members

__all__ = ["LearnerParams", "Learner", "ActionSet", "TrialResult", "NORMAL", "REPLAY", "widrow_hoff"]

NORMAL = "NORMAL"
REPLAY = "REPLAY"


@dataclass(frozen=True)
class LearnerParams:
    eta: float = 0.1
    gamma: float = 0.99
    iota: int = 10
    map_size: int = 10
    n_best: int = 10
    n_novel: int = 10
    best_fitness: float = 0.0
    novel_fitness: float = -1.0
    de: DeParams = field(default_factory=DeParams)
    spec: MlpSpec = field(default_factory=lambda: MlpSpec(2, 10, 1))

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must lie in (0, 1]")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        for name in ("iota", "map_size", "n_best", "n_novel"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n_best < 2:
            raise ValueError("n_best must be at least 2 so the hall of fame is nonempty")

    @property
    def subpop_size(self):
        return self.n_best + self.n_novel

    @property
    def evolution_trigger(self):
        return self.subpop_size * self.iota

    @property
    def hof_capacity(self):
        return self.n_best // 2


class ActionSet(NamedTuple):
    cell: int
    slot: int


class TrialResult(NamedTuple):
    steps: int
    accumulated_reward: float
    phase: str
    map_updates: int
    v_max: float


def widrow_hoff(fitness, estimate, eta):
    return fitness + eta * (estimate - fitness)


@njit(cache=True)
def _run_trial(
    cells, meta, uniq, genes, fitness, members, candidates,
    n_in, n_hidden, n_out, eta, gamma, obs_lo, obs_hi,
    first_obs, noise, cursor, pos, vel, step_index, v_max, step_cap, act_lo, act_hi,
):
    x = np.empty(n_in)
    out = np.empty(n_out)
    obs0 = first_obs[0]
    obs1 = first_obs[1]
    prev_c = -1
    prev_s = -1
    prev_r = 0.0
    acc = 0.0
    steps = 0
    while True:
        x[0] = (obs0 - obs_lo[0]) / (obs_hi[0] - obs_lo[0])
        x[1] = (obs1 - obs_lo[1]) / (obs_hi[1] - obs_lo[1])
        w = _observe(cells, meta, uniq, x)
        if members[w] == -1:
            members[w] = candidates[w]
        s = members[w]
        if prev_c >= 0:
            fmax = fitness[w, 0]
            for j in range(1, fitness.shape[1]):
                if fitness[w, j] > fmax:
                    fmax = fitness[w, j]
            estimate = prev_r + gamma * fmax
            f = fitness[prev_c, prev_s]
            fitness[prev_c, prev_s] = f + eta * (estimate - f)
        _forward(genes[w, s], n_in, n_hidden, n_out, x, out)
        a = min(max(out[0], act_lo), act_hi)
        pos, vel = _dynamics(pos, vel, a, v_max)
        step_index += 1
        steps += 1
        if pos >= POS_GOAL:
            r = 0.0
            terminal = True
        else:
            r = -1.0
            terminal = step_index >= step_cap
        obs0 = pos + noise[cursor, 0]
        obs1 = vel + noise[cursor, 1]
        cursor += 1
        acc += r
        prev_c = w
        prev_s = s
        prev_r = r
        if terminal:
            break
    return steps, acc, prev_r, prev_c, prev_s, pos, vel, step_index, cursor


class Learner:
    """State of one NOTC run: map, population, hall of fame, current team."""

    def __init__(self, params=None, rng=None, action_low=-1.0, action_high=1.0):
        self.params = params or LearnerParams()
        self.rng = rng if rng is not None else np.random.default_rng()
        p = self.params
        self.action_low = action_low
        self.action_high = action_high
        self.map = NoveltyMap(p.map_size, p.spec.n_inputs)
        self.population = Population.random(
            p.map_size, p.n_best, p.n_novel, p.spec, self.rng, p.best_fitness, p.novel_fitness
        )
        self.hof = HallOfFame(p.hof_capacity)
        self.trial_counter = 0
        self.trials_since_evolution = 0
        self.evolutions = 0
        self.replay_queue = deque()
        self.phase = NORMAL
        self.prev_action_set: Optional[ActionSet] = None
        self._team: Optional[Team] = None
        self._replay_entry = None

    @property
    def current_team(self):
        if self._team is None:
            if self.replay_queue:
                self._replay_entry, members = self.replay_queue[0]
                self._team = Team.draw(self.population, self.rng, members.copy())
            else:
                self._replay_entry = None
                self._team = Team.draw(self.population, self.rng)
        return self._team

    def _credit(self, estimate):
        c, s = self.prev_action_set
        fit = self.population.fitness
        fit[c, s] = widrow_hoff(fit[c, s], estimate, self.params.eta)

    def act(self, observation, reward=0.0):
        """Choose the action for a normalized observation.

        ``reward`` is the reward that followed the previous action of this
        trial and is ignored on the first step.
        """
        team = self.current_team
        winner = self.map.observe(observation)
        ref = actor_for(self.population, winner, team)
        slot = self.population.slot(ref)
        if self.prev_action_set is not None:
            self._credit(reward + self.params.gamma * self.population.fitness[winner].max())
        spec = self.params.spec
        out = np.empty(spec.n_outputs)
        x = np.ascontiguousarray(observation, dtype=np.float64)
        _forward(self.population.genes[winner, slot], spec.n_inputs, spec.n_hidden, spec.n_outputs, x, out)
        self.prev_action_set = ActionSet(winner, slot)
        out = np.minimum(np.maximum(out, self.action_low), self.action_high)
        return float(out[0]) if spec.n_outputs == 1 else out

    def end_trial(self, final_reward, accumulated_reward):
        """Close the trial: terminal credit, hall of fame bookkeeping, counters.

        Returns the phase the finished trial ran in.
        """
        team = self.current_team
        if self.prev_action_set is not None:
            self._credit(final_reward)
        team.accumulated_reward = float(accumulated_reward)
        phase = self.phase
        if phase == REPLAY:
            entry, _ = self.replay_queue.popleft()
            self.hof.overwrite(entry, accumulated_reward)
            if not self.replay_queue:
                self.phase = NORMAL
        else:
            self.hof.consider(team, self.population)
            self.trials_since_evolution += 1
        self.trial_counter += 1
        self.prev_action_set = None
        self._team = None
        self._replay_entry = None
        return phase

    def maybe_evolve(self):
        """Evolve once enough learning trials have passed; queue hall-of-fame replays."""
        if self.trials_since_evolution < self.params.evolution_trigger:
            return False
        evolve(self.population, self.hof, self.params.de, self.rng, self.params.novel_fitness)
        self.trials_since_evolution = 0
        self.evolutions += 1
        self.replay_queue = deque((entry, replay_members(entry, k)) for k, entry in enumerate(self.hof.entries))
        self.phase = REPLAY if self.replay_queue else NORMAL
        return True

    def run_trial(self, env, trial_index=0):
        """Run one complete trial (including evolution scheduling) and report it."""
        if not isinstance(env, MountainCar) or self.params.spec.n_inputs != 2 or self.params.spec.n_outputs != 1:
            return self.run_trial_stepwise(env, trial_index)
        updates_before = self.map.update_count
        first_obs = env.reset(trial_index)
        team = self.current_team
        env._ensure_noise(env.config.step_cap - env.step_index)
        spec = self.params.spec
        steps, acc, final_r, prev_c, prev_s, pos, vel, step_index, cursor = _run_trial(
            self.map._cells, self.map._meta, self.map._uniq,
            self.population.genes, self.population.fitness, team.members, team.candidates,
            spec.n_inputs, spec.n_hidden, spec.n_outputs, self.params.eta, self.params.gamma,
            env.observation_low, env.observation_high,
            first_obs, env._noise, env._cursor, env.pos, env.vel, env.step_index,
            env.v_max, env.config.step_cap, float(self.action_low), float(self.action_high),
        )
        env.pos, env.vel, env.step_index, env._cursor, env.done = pos, vel, step_index, cursor, True
        self.prev_action_set = ActionSet(prev_c, prev_s)
        phase = self.end_trial(final_r, acc)
        self.maybe_evolve()
        return TrialResult(steps, acc, phase, self.map.update_count - updates_before, env.v_max)

    def run_trial_stepwise(self, env, trial_index=0):
        """Reference route for ``run_trial`` using ``act`` one step at a time."""
        updates_before = self.map.update_count
        obs = env.reset(trial_index)
        reward = 0.0
        acc = 0.0
        steps = 0
        while True:
            action = self.act(env.normalize(obs), reward)
            obs, reward, terminal = env.step(action)
            acc += reward
            steps += 1
            if terminal:
                break
        phase = self.end_trial(reward, acc)
        self.maybe_evolve()
        return TrialResult(steps, acc, phase, self.map.update_count - updates_before, env.v_max)
