"""Fixed-topology MLP individuals and the two reproduction operators.

A chromosome is a flat float64 vector laid out as::

    W1 (n_hidden x n_inputs, row-major) | b1 (n_hidden) | W2 (n_outputs x n_hidden, row-major) | b2 (n_outputs)

Hidden neurons use tanh; input and output neurons are identity. The input
layer has no bias.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = [
    "MlpSpec",
    "DeParams",
    "chromosome_length",
    "forward",
    "random_chromosome",
    "de_trial",
    "index_copy",
]


@dataclass(frozen=True)
class MlpSpec:
    n_inputs: int
    n_hidden: int = 10
    n_outputs: int = 1

    def __post_init__(self):
        for name in ("n_inputs", "n_hidden", "n_outputs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    @property
    def length(self):
        return chromosome_length(self)


@dataclass(frozen=True)
class DeParams:
    crossover_rate: float = 0.2
    f_low: float = 0.0
    f_high: float = 2.0

    def __post_init__(self):
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")
        if self.f_low > self.f_high:
            raise ValueError("differential weight range is empty")


def chromosome_length(spec):
    return (spec.n_inputs * spec.n_hidden + spec.n_hidden) + (spec.n_hidden * spec.n_outputs + spec.n_outputs)


@njit(cache=True)
def _forward(genes, n_in, n_hidden, n_out, x, out):
    hidden = np.empty(n_hidden)
    b1 = n_hidden * n_in
    for h in range(n_hidden):
        s = genes[b1 + h]
        row = h * n_in
        for i in range(n_in):
            s += genes[row + i] * x[i]
        hidden[h] = math.tanh(s)
    w2 = b1 + n_hidden
    b2 = w2 + n_out * n_hidden
    for o in range(n_out):
        s = genes[b2 + o]
        row = w2 + o * n_hidden
        for h in range(n_hidden):
            s += genes[row + h] * hidden[h]
        out[o] = s


def forward(spec, chromosome, x):
    """Evaluate the network encoded by ``chromosome`` on input ``x``."""
    genes = np.ascontiguousarray(chromosome, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64).reshape(-1)
    if genes.shape != (chromosome_length(spec),):
        raise ValueError(f"chromosome has {genes.size} genes, spec needs {chromosome_length(spec)}")
    if x.shape[0] != spec.n_inputs:
        raise ValueError(f"input has {x.shape[0]} values, spec needs {spec.n_inputs}")
    out = np.empty(spec.n_outputs)
    _forward(genes, spec.n_inputs, spec.n_hidden, spec.n_outputs, x, out)
    return out


def random_chromosome(spec, rng):
    """Genes drawn i.i.d. from U[-1, 1]."""
    return rng.uniform(-1.0, 1.0, chromosome_length(spec))


def de_trial(base, r1, r2, r3, params, rng, f=None):
    """Differential-evolution trial vector with binomial crossover.

    The mutant is ``r1 + F * (r2 - r3)`` with ``F`` drawn once per call from
    the configured range (or given explicitly via ``f``). Each gene comes from
    the mutant with probability ``crossover_rate``; one uniformly chosen gene
    always does.
    """
    base = np.asarray(base, dtype=np.float64)
    vectors = [np.asarray(v, dtype=np.float64) for v in (r1, r2, r3)]
    if any(v.shape != base.shape for v in vectors):
        raise ValueError("DE operands must share one chromosome length")
    r1, r2, r3 = vectors
    if f is None:
        f = rng.uniform(params.f_low, params.f_high)
    mutant = r1 + f * (r2 - r3)
    take = rng.random(base.shape[0]) < params.crossover_rate
    take[rng.integers(base.shape[0])] = True
    return np.where(take, mutant, base)


def index_copy(population, rng):
    """Independent copy of a uniformly chosen chromosome."""
    if len(population) == 0:
        raise ValueError("index_copy from an empty population")
    return np.array(population[rng.integers(len(population))], dtype=np.float64, copy=True)
