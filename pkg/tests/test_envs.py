import math

import numpy as np
import pytest

from notc.envs import EnvConfig, MountainCar, make_env, random_policy_baseline

from oracles import mountain_car_rollout


def bang_bang(obs):
    return 1.0 if obs[1] >= 0 else -1.0


def rollout(env, policy, trial_index=0):
    obs = env.reset(trial_index)
    states, rewards = [env.state], []
    while True:
        obs, r, done = env.step(policy(obs))
        states.append(env.state)
        rewards.append(r)
        if done:
            return states, rewards


def test_reset_state():
    env = make_env("mc")
    obs = env.reset()
    assert obs.tolist() == [-0.5, 0.0]
    assert env.state == (-0.5, 0.0, 0)


def test_first_step_from_rest():
    env = make_env("mc")
    env.reset()
    obs, r, done = env.step(0.0)
    assert env.vel == pytest.approx(-1.76844e-4, abs=1e-9)
    assert env.vel == math.cos(-1.5) * (-0.0025)
    assert env.pos == pytest.approx(-0.500176844, abs=1e-9)
    assert (r, done) == (-1.0, False)


def test_goal_is_terminal_with_zero_reward():
    env = make_env("mc")
    env.reset()
    env.pos, env.vel = 0.55, 0.06
    obs, r, done = env.step(1.0)
    assert env.pos >= 0.6
    assert (r, done) == (0.0, True)


def test_stepping_a_finished_trial_raises():
    env = make_env("mc")
    env.reset()
    env.pos, env.vel = 0.59, 0.05
    env.step(1.0)
    with pytest.raises(RuntimeError):
        env.step(0.0)


def test_step_cap():
    env = MountainCar(EnvConfig(step_cap=1000))
    states, rewards = rollout(env, lambda obs: 0.0)
    assert len(rewards) == 1000 and all(r == -1.0 for r in rewards)
    assert sum(rewards) == -1000


def test_left_wall_zeroes_velocity():
    env = make_env("mc")
    env.reset()
    env.pos, env.vel = -1.19, -0.05
    env.step(-1.0)
    assert env.pos == -1.2 and env.vel == 0.0


def test_velocity_is_clamped():
    env = make_env("mc")
    env.reset()
    env.pos, env.vel = -0.52, 0.0699
    env.step(1.0)
    assert env.vel == 0.07


def test_matches_straight_line_equations():
    actions = np.random.default_rng(4).uniform(-1.5, 1.5, 1000).tolist()
    expected = mountain_car_rollout(actions)
    env = make_env("mc")
    env.reset()
    for a, (pos, vel, r, done) in zip(actions, expected):
        obs, reward, terminal = env.step(a)
        assert abs(env.pos - pos) <= 1e-12 and abs(env.vel - vel) <= 1e-12
        assert (reward, terminal) == (r, done)
        if terminal:
            break


def test_deterministic_without_noise():
    actions = np.random.default_rng(9).uniform(-1, 1, 1000)
    runs = []
    for _ in range(2):
        env = make_env("mc")
        env.reset()
        traj = []
        for a in actions:
            obs, r, done = env.step(a)
            traj.append((env.pos, env.vel, *obs))
            if done:
                break
        runs.append(traj)
    assert runs[0] == runs[1]


def test_constant_push_cannot_reach_goal():
    env = make_env("mc")
    states, rewards = rollout(env, lambda obs: 1.0)
    assert rewards[-1] == -1.0 and len(rewards) == 1000
    assert max(s.pos for s in states) < 0.6


def test_goal_needs_a_leftward_excursion():
    env = make_env("mc")
    states, rewards = rollout(env, bang_bang)
    assert rewards[-1] == 0.0
    assert min(s.pos for s in states) < -0.5


def test_reward_accounting():
    env = make_env("mc")
    states, rewards = rollout(env, bang_bang)
    nonterminal = len(rewards) - 1
    assert sum(rewards) == -nonterminal


class TestNoise:
    def test_statistics(self):
        env = make_env("mc-noisy", np.random.default_rng(123))
        env.reset()
        reads = np.array([env.observe() for _ in range(10_000)])
        err = reads - [env.pos, env.vel]
        assert abs(err[:, 0].mean()) <= 0.002
        assert abs(err[:, 0].std() - 0.06) <= 0.005
        assert abs(err[:, 1].std() - 0.009) <= 0.001

    def test_noise_only_touches_observations(self):
        actions = np.random.default_rng(0).uniform(-1, 1, 300)
        clean, noisy = make_env("mc"), make_env("mc-noisy", np.random.default_rng(1))
        o1, o2 = clean.reset(), noisy.reset()
        assert not np.array_equal(o1, o2)
        for a in actions:
            clean.step(a)
            noisy.step(a)
            assert (clean.pos, clean.vel) == (noisy.pos, noisy.vel)
        assert not np.array_equal(noisy.observe(), noisy.observe())

    def test_reset_observation_is_noisy(self):
        env = make_env("mc-noisy", np.random.default_rng(2))
        assert not np.array_equal(env.reset(), [-0.5, 0.0])


class TestWeather:
    @pytest.mark.parametrize("trial,v_max", [(0, 0.07), (9999, 0.07), (10000, 0.04), (19999, 0.04), (20000, 0.07), (30000, 0.04)])
    def test_velocity_range_schedule(self, trial, v_max):
        env = make_env("mc-weather")
        env.reset(trial)
        assert env.v_max == v_max

    def test_reduced_range_binds(self):
        env = make_env("mc-weather")
        states, _ = rollout(env, bang_bang, trial_index=10000)
        assert max(abs(s.vel) for s in states) <= 0.04
        assert max(abs(s.vel) for s in states) == 0.04

    def test_no_weather_by_default(self):
        env = make_env("mc")
        env.reset(10000)
        assert env.v_max == 0.07


def test_normalization_maps_ranges_to_unit_interval():
    env = make_env("mc")
    np.testing.assert_allclose(env.normalize([-1.2, -0.07]), [0.0, 0.0])
    np.testing.assert_allclose(env.normalize([0.6, 0.07]), [1.0, 1.0])
    np.testing.assert_allclose(env.normalize([-0.5, 0.0]), [0.7 / 1.8, 0.5])


def test_config_validation():
    with pytest.raises(ValueError):
        EnvConfig(noise_pos_sigma=-1)
    with pytest.raises(ValueError):
        EnvConfig(reduced_v_max=0.08)
    with pytest.raises(ValueError):
        make_env("cartpole")


class TestBaseline:
    def test_idle_policy_never_reaches_goal(self):
        env = make_env("mc")
        assert random_policy_baseline(env, 1, np.random.default_rng(0), policy=lambda obs: 0.0) == -1000.0

    def test_single_trial_mean(self):
        env = make_env("mc")
        _, rewards = rollout(env, bang_bang)
        assert random_policy_baseline(env, 1, np.random.default_rng(0), policy=bang_bang) == sum(rewards)

    def test_random_rewards_in_bounds(self):
        env = make_env("mc")
        mean = random_policy_baseline(env, 5, np.random.default_rng(0))
        assert -1000.0 <= mean <= 0.0

    def test_needs_a_trial(self):
        with pytest.raises(ValueError):
            random_policy_baseline(make_env("mc"), 0, np.random.default_rng(0))
