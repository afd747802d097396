"""Train NOTC on the continuous mountain car and summarise the curve.

Runs a short seeded experiment (3 runs x 3000 trials, a few seconds) and
prints the best-of-100-trials curve averaged over runs, together with the
Novelty Map update counts per window.

Run with ``python demos/03_learning_curve.py``.
"""

from notc.harness import ExperimentConfig, aggregate, run_experiment, update_decay_report

config = ExperimentConfig(env="mc", runs=3, trials=3000, window=100, seed=0)
records = run_experiment(config)

# %% Best-of-window reward, mean and std across runs.
curve = aggregate(records, config.window)
for point in curve[::3]:
    print(f"window {point.window_index:3d}: {point.mean_best_reward:8.1f} +- {point.std_best_reward:.1f}")

# %% Map updates per window fall off quickly once the input space is divided.
updates = update_decay_report(records, config.window)
print("map updates per window:", updates[:10], "...", updates[-3:])

# %% Replay trials re-run the hall of fame right after each evolution.
replays = [r.trial for r in records if r.run_id == 0 and r.phase == "REPLAY"]
print("first replay trials of run 0:", replays[:10])
