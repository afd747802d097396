"""The three mountain-car environments.

Run with ``python demos/02_mountain_car.py``.
"""

import numpy as np

from notc import make_env, random_policy_baseline


def energy_pump(obs):
    # push in the direction of motion
    return 1.0 if obs[1] >= 0 else -1.0


def episode(env, policy, trial_index=0):
    obs = env.reset(trial_index)
    total, steps = 0.0, 0
    while True:
        obs, reward, done = env.step(policy(obs))
        total += reward
        steps += 1
        if done:
            return steps, total


# %% Deterministic car: idling never gets there, pumping energy does.
env = make_env("mc")
print("idle:", episode(env, lambda obs: 0.0))
print("constant +1:", episode(env, lambda obs: 1.0))
print("energy pump:", episode(env, energy_pump))
print("uniform random actions, mean over 20 trials:", random_policy_baseline(env, 20, np.random.default_rng(0)))

# %% Noisy sensors: same dynamics, corrupted readings.
noisy = make_env("mc-noisy", np.random.default_rng(1))
noisy.reset()
reads = np.array([noisy.observe() for _ in range(5)])
print("five reads of the start state:\n", reads.round(4))
print("energy pump on noisy readings:", episode(noisy, energy_pump))

# %% Unstable weather: the velocity cap alternates every 10000 trials.
weather = make_env("mc-weather")
for trial in (0, 10000, 20000, 30000):
    print(f"trial {trial}: v_max = {weather.v_max_for(trial)}, pump takes", episode(weather, energy_pump, trial)[0], "steps")
