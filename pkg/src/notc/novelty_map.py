"""Novelty Map: a bounded, frequency-independent quantizer of the input space.

The map stores raw input arrays (cells). While it is not full every input is
inserted. Once full, an input replaces the least unique stored cell only when
its own uniqueness (distance to the closest stored cell) is strictly higher.
Every presentation returns the index of the cell closest to the input.

Uniqueness of an array is its smallest Euclidean distance to any other array
of the set. Ties (equidistant winners, equal minimum uniqueness) go to the
lowest cell index.
"""

import math

import numpy as np
from numba import njit

__all__ = ["NoveltyMap", "uniqueness"]


@njit(cache=True)
def _distance(a, b):
    s = 0.0
    for k in range(a.shape[0]):
        d = a[k] - b[k]
        s += d * d
    return math.sqrt(s)


@njit(cache=True)
def _refresh_uniqueness(cells, n, uniq):
    for i in range(n):
        best = np.inf
        for j in range(n):
            if j != i:
                d = _distance(cells[i], cells[j])
                if d < best:
                    best = d
        uniq[i] = best


@njit(cache=True)
def _nearest(cells, n, x):
    best = np.inf
    winner = 0
    for j in range(n):
        d = _distance(x, cells[j])
        if d < best:
            best = d
            winner = j
    return winner


@njit(cache=True)
def _observe(cells, meta, uniq, x):
    """One pass of the map algorithm. ``meta`` holds ``[size, update_count]``."""
    n = meta[0]
    if n < cells.shape[0]:
        cells[n, :] = x
        meta[0] = n + 1
        meta[1] += 1
        _refresh_uniqueness(cells, n + 1, uniq)
        return _nearest(cells, n + 1, x)

    # input uniqueness is its distance to the nearest stored cell
    best = np.inf
    winner = 0
    for j in range(n):
        d = _distance(x, cells[j])
        if d < best:
            best = d
            winner = j

    lowest = np.inf
    victim = -1
    for j in range(n):
        if uniq[j] < lowest:
            lowest = uniq[j]
            victim = j

    if victim >= 0 and best > lowest:
        cells[victim, :] = x
        meta[1] += 1
        _refresh_uniqueness(cells, n, uniq)
        return _nearest(cells, n, x)
    return winner


def _as_array(x, dim=None):
    arr = np.ascontiguousarray(x, dtype=np.float64).reshape(-1)
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"input has dimension {arr.shape[0]}, map expects {dim}")
    return arr


def uniqueness(index, arrays):
    """Smallest Euclidean distance from ``arrays[index]`` to every other array.

    Raises ``ValueError`` for sets with fewer than two arrays or mixed
    dimensions.
    """
    if len(arrays) < 2:
        raise ValueError("uniqueness needs at least two arrays")
    dims = {np.asarray(a).reshape(-1).shape[0] for a in arrays}
    if len(dims) != 1:
        raise ValueError(f"arrays have mixed dimensions {sorted(dims)}")
    if not -len(arrays) <= index < len(arrays):
        raise IndexError(f"index {index} out of range for {len(arrays)} arrays")
    stacked = np.ascontiguousarray(np.vstack([np.asarray(a, dtype=np.float64).reshape(-1) for a in arrays]))
    index = index % len(arrays)
    best = np.inf
    for j in range(len(arrays)):
        if j != index:
            best = min(best, _distance(stacked[index], stacked[j]))
    return float(best)


class NoveltyMap:
    """Bounded table of the most novel inputs seen so far.

    Parameters
    ----------
    max_size : int
        Maximum number of cells.
    dim : int
        Dimensionality of every input array.
    """

    def __init__(self, max_size, dim):
        if max_size < 1:
            raise ValueError("max_size must be positive")
        if dim < 1:
            raise ValueError("dim must be positive")
        self.max_size = int(max_size)
        self.dim = int(dim)
        self._cells = np.zeros((self.max_size, self.dim))
        # [size, update_count]; an array so the compiled kernels can mutate it
        self._meta = np.zeros(2, dtype=np.int64)
        self._uniq = np.full(self.max_size, np.inf)

    @property
    def size(self):
        return int(self._meta[0])

    @property
    def update_count(self):
        """Number of cell-value modifications (insertions and replacements)."""
        return int(self._meta[1])

    @property
    def cells(self):
        """Copy of the stored weight arrays, one row per cell."""
        return self._cells[: self.size].copy()

    def cell_uniqueness(self):
        """Uniqueness of every stored cell relative to the others."""
        return self._uniq[: self.size].copy()

    def observe(self, x):
        """Present an input; update the map and return the winning cell index."""
        return int(_observe(self._cells, self._meta, self._uniq, _as_array(x, self.dim)))

    def nearest(self, x):
        """Index of the closest cell, without modifying the map."""
        if self.size == 0:
            raise ValueError("nearest() on an empty map")
        return int(_nearest(self._cells, self.size, _as_array(x, self.dim)))

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"NoveltyMap(size={self.size}/{self.max_size}, dim={self.dim}, updates={self.update_count})"
