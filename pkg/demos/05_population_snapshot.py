"""Inspect a trained population: map cells, fitness, hall of fame.

Run with ``python demos/05_population_snapshot.py``.
"""

import io

import numpy as np

from notc.harness import ExperimentConfig, run_single
from notc.population import read_snapshot, write_snapshot

records, learner, env = run_single(ExperimentConfig(trials=2000), run_id=0)

# %% Where the map placed its cells (in physical units).
low, high = env.observation_low, env.observation_high
for c, w in enumerate(learner.map.cells):
    pos, vel = low + w * (high - low)
    print(f"cell {c}: pos {pos:+.3f} vel {vel:+.4f}  max fitness {learner.population.fitness[c].max():.2f}")

# %% Hall of fame rewards and which cells each team used.
for entry in learner.hof.entries:
    used = [c for c, m in enumerate(entry.members) if m is not None]
    print(f"team reward {entry.reward:.0f}, active cells {used}")

# %% Snapshots round-trip through text.
buf = io.StringIO()
write_snapshot(learner.population, learner.map, buf)
buf.seek(0)
population, weights = read_snapshot(buf)
print("snapshot identical:", np.array_equal(population.genes, learner.population.genes))
