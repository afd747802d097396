"""Ten cells versus two cells with the same number of individuals.

Both set-ups hold 200 individuals: 10 cells x (10 best + 10 novel) and
2 cells x (50 best + 50 novel). Paired seeds, 4 runs x 5000 trials.

Run with ``python demos/04_two_cell_ablation.py``.
"""

from dataclasses import replace

from notc.harness import ExperimentConfig, aggregate, run_experiment

ten = ExperimentConfig(runs=4, trials=5000, seed=0)
two = replace(ten, cells=2, best=50, novel=50)

for name, config in (("10 cells", ten), ("2 cells", two)):
    curve = aggregate(run_experiment(config), config.window)
    marks = ", ".join(f"{p.mean_best_reward:.0f}" for p in curve[::10])
    print(f"{name}: best-of-100 every 1000 trials -> {marks}")
