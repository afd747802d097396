"""Novelty Map basics: filling, replacement by uniqueness, frequency independence.

Run with ``python demos/01_novelty_map.py``.
"""

import numpy as np

from notc import NoveltyMap, uniqueness

# %% Uniqueness is the distance to the closest other array.
arrays = [[0.0], [1.0], [3.0]]
print("uniqueness of each array:", [uniqueness(i, arrays) for i in range(3)])

# %% A map of five cells fed a skewed 2-D stream.
# Most inputs cluster near the origin; a few rare ones lie far out.
rng = np.random.default_rng(0)
common = rng.normal(0.0, 0.05, (2000, 2))
rare = rng.uniform(-1.0, 1.0, (10, 2))
stream = np.concatenate([common, rare])
rng.shuffle(stream)

nmap = NoveltyMap(max_size=5, dim=2)
for x in stream:
    nmap.observe(x)
print("cells after the stream:\n", nmap.cells.round(3))
print("cell uniqueness:", nmap.cell_uniqueness().round(3))
print("updates:", nmap.update_count)

# %% Flooding the map with one of its own cells changes nothing.
before = nmap.update_count
for _ in range(10_000):
    nmap.observe(nmap.cells[0])
print("updates caused by 10000 repeated inputs:", nmap.update_count - before)

# %% The winner of an input is the closest cell; nearest() asks without updating.
print("winner of (0, 0):", nmap.nearest([0.0, 0.0]))
