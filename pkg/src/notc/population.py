"""Novelty Map population: per-cell subpopulations, teams, hall of fame, evolution.

Individuals live in dense arrays indexed by ``(cell, slot)``. Slots
``0 .. n_best-1`` form the best group and ``n_best .. n_best+n_novel-1`` the
novel group.
"""

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .genome import de_trial, index_copy

__all__ = [
    "DONT_CARE",
    "BEST",
    "NOVEL",
    "IndividualRef",
    "Individual",
    "Population",
    "Team",
    "Member",
    "HofEntry",
    "HallOfFame",
    "actor_for",
    "evolve",
    "hof_consider",
    "replay_members",
    "write_snapshot",
    "read_snapshot",
]

DONT_CARE = -1
BEST = "best"
NOVEL = "novel"


class IndividualRef(NamedTuple):
    cell: int
    group: str
    index: int


class Individual(NamedTuple):
    chromosome: np.ndarray
    fitness: float


class Population:
    """All subpopulations of the map, stored as ``genes[cell, slot, gene]``."""

    def __init__(self, genes, fitness, n_best):
        genes = np.ascontiguousarray(genes, dtype=np.float64)
        fitness = np.ascontiguousarray(fitness, dtype=np.float64)
        if genes.ndim != 3 or fitness.shape != genes.shape[:2]:
            raise ValueError("genes must be (cells, slots, length) and fitness (cells, slots)")
        if not 0 < n_best < genes.shape[1]:
            raise ValueError("both groups need at least one slot")
        self.genes = genes
        self.fitness = fitness
        self.n_best = int(n_best)

    @classmethod
    def random(cls, n_cells, n_best, n_novel, spec, rng, best_fitness=0.0, novel_fitness=-1.0):
        length = spec.length
        genes = rng.uniform(-1.0, 1.0, (n_cells, n_best + n_novel, length))
        fitness = np.empty((n_cells, n_best + n_novel))
        fitness[:, :n_best] = best_fitness
        fitness[:, n_best:] = novel_fitness
        return cls(genes, fitness, n_best)

    @property
    def n_cells(self):
        return self.genes.shape[0]

    @property
    def subpop_size(self):
        return self.genes.shape[1]

    @property
    def n_novel(self):
        return self.subpop_size - self.n_best

    @property
    def total_size(self):
        return self.n_cells * self.subpop_size

    def ref(self, cell, slot):
        if slot < self.n_best:
            return IndividualRef(cell, BEST, slot)
        return IndividualRef(cell, NOVEL, slot - self.n_best)

    def slot(self, ref):
        return ref.index if ref.group == BEST else self.n_best + ref.index

    def __getitem__(self, ref):
        s = self.slot(ref)
        return Individual(self.genes[ref.cell, s], float(self.fitness[ref.cell, s]))

    def best(self, cell):
        return [Individual(g, float(f)) for g, f in zip(self.genes[cell, : self.n_best], self.fitness[cell, : self.n_best])]

    def novel(self, cell):
        return [Individual(g, float(f)) for g, f in zip(self.genes[cell, self.n_best :], self.fitness[cell, self.n_best :])]

    def copy(self):
        return Population(self.genes.copy(), self.fitness.copy(), self.n_best)


class Team:
    """One acting individual per activated cell, fixed for the trial.

    ``members[c]`` is a slot index or ``DONT_CARE``. ``candidates[c]`` is the
    uniformly drawn slot the cell will use on its first activation; drawing
    it up front is equivalent to drawing at activation time and lets a whole
    trial run without calling back into the generator.
    """

    def __init__(self, candidates, members=None):
        self.candidates = np.asarray(candidates, dtype=np.int64)
        if members is None:
            members = np.full(self.candidates.shape[0], DONT_CARE, dtype=np.int64)
        self.members = np.asarray(members, dtype=np.int64)
        self.accumulated_reward = 0.0

    @classmethod
    def draw(cls, population, rng, members=None):
        return cls(rng.integers(0, population.subpop_size, population.n_cells), members)

    def __repr__(self):
        return f"Team(members={self.members.tolist()}, reward={self.accumulated_reward})"


def actor_for(population, cell, team):
    """Reference of the individual acting for ``cell`` in this trial."""
    if team.members[cell] == DONT_CARE:
        team.members[cell] = team.candidates[cell]
    return population.ref(cell, int(team.members[cell]))


class Member(NamedTuple):
    genes: np.ndarray
    fitness: float


@dataclass
class HofEntry:
    members: list  # per cell: Member snapshot or None for DONT_CARE
    reward: float

    def same_members(self, other):
        for a, b in zip(self.members, other):
            if (a is None) != (b is None):
                return False
            if a is not None and not np.array_equal(a.genes, b.genes):
                return False
        return True


@dataclass
class HallOfFame:
    """Teams with the highest accumulated reward, best first.

    Entries hold chromosome snapshots, so later changes to the population
    cannot alter a recorded team.
    """

    capacity: int
    entries: list = field(default_factory=list)

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("hall of fame capacity must be positive")

    def __len__(self):
        return len(self.entries)

    @property
    def rewards(self):
        return [e.reward for e in self.entries]

    def qualifies(self, reward):
        return len(self.entries) < self.capacity or reward > self.entries[-1].reward

    def _sort(self):
        self.entries.sort(key=lambda e: -e.reward)

    def consider(self, team, population):
        """Offer a finished team; returns True when the hall changed."""
        reward = float(team.accumulated_reward)
        if not self.qualifies(reward):
            return False
        members = [
            None if s == DONT_CARE else Member(population.genes[c, s].copy(), float(population.fitness[c, s]))
            for c, s in enumerate(team.members)
        ]
        for entry in self.entries:
            if entry.same_members(members):
                if reward <= entry.reward:
                    return False
                entry.reward = reward
                self._sort()
                return True
        self.entries.append(HofEntry(members, reward))
        self._sort()
        del self.entries[self.capacity :]
        return True

    def overwrite(self, entry, reward):
        """Replace the stored reward of ``entry`` with a fresh measurement."""
        entry.reward = float(reward)
        self._sort()


def hof_consider(hof, team, population):
    hof.consider(team, population)
    return hof


def _held_fitness(genes, fitness, member):
    for s in range(genes.shape[0]):
        if np.array_equal(genes[s], member.genes):
            return float(fitness[s])
    return member.fitness


def evolve(population, hof, de, rng, novel_fitness=-1.0):
    """Rebuild every subpopulation in place.

    Per cell, the first half of the best group takes the members of the hall
    of fame teams in hall order (a random individual of the cell stands in
    for a don't-care or a missing entry); the rest of the best group takes
    the fittest individuals of the cell, best and novel alike. The novel
    group is then refilled, each slot with even odds, by copying a random
    individual of the whole population or by a DE trial vector built on the
    best individual at the same index.
    """
    n_cells, n_best, n_novel = population.n_cells, population.n_best, population.n_novel
    half = n_best // 2
    old_genes = population.genes.copy()
    old_fit = population.fitness.copy()
    genes = population.genes
    fitness = population.fitness

    for c in range(n_cells):
        for k in range(half):
            member = hof.entries[k].members[c] if k < len(hof) else None
            if member is None:
                s = rng.integers(population.subpop_size)
                genes[c, k] = old_genes[c, s]
                fitness[c, k] = old_fit[c, s]
            else:
                genes[c, k] = member.genes
                fitness[c, k] = _held_fitness(old_genes[c], old_fit[c], member)
        order = np.argsort(-old_fit[c], kind="stable")[: n_best - half]
        genes[c, half:n_best] = old_genes[c, order]
        fitness[c, half:n_best] = old_fit[c, order]

    pool = genes[:, :n_best].reshape(-1, genes.shape[2]).copy()
    for c in range(n_cells):
        for j in range(n_novel):
            if rng.random() < 0.5:
                child = index_copy(pool, rng)
            else:
                r1, r2, r3 = rng.choice(len(pool), 3, replace=False)
                child = de_trial(genes[c, j % n_best], pool[r1], pool[r2], pool[r3], de, rng)
            genes[c, n_best + j] = child
            fitness[c, n_best + j] = novel_fitness
    return population


def replay_members(entry, k):
    """Team members re-enacting ``entry`` after ``evolve`` placed it at best slot ``k``."""
    return np.array([DONT_CARE if m is None else k for m in entry.members], dtype=np.int64)


def _fmt(x):
    return repr(float(x))


def write_snapshot(population, novelty_map, fh):
    """Write a text snapshot: per cell its map weight array then every individual."""
    fh.write(
        f"notc-population cells {population.n_cells} best {population.n_best} "
        f"novel {population.n_novel} genes {population.genes.shape[2]}\n"
    )
    stored = novelty_map.cells if novelty_map is not None else np.empty((0, 0))
    for c in range(population.n_cells):
        weights = " ".join(_fmt(v) for v in stored[c]) if c < len(stored) else "-"
        fh.write(f"cell {c} map {weights}\n")
        for s in range(population.subpop_size):
            ref = population.ref(c, s)
            genes = " ".join(_fmt(v) for v in population.genes[c, s])
            fh.write(f"{ref.group} {ref.index} {_fmt(population.fitness[c, s])} {genes}\n")


def read_snapshot(fh):
    """Inverse of ``write_snapshot``; returns ``(population, map_weights)``."""
    header = fh.readline().split()
    if not header or header[0] != "notc-population":
        raise ValueError("not a population snapshot")
    n_cells, n_best, n_novel, length = (int(header[i]) for i in (2, 4, 6, 8))
    genes = np.empty((n_cells, n_best + n_novel, length))
    fitness = np.empty((n_cells, n_best + n_novel))
    weights: list[Optional[np.ndarray]] = []
    for c in range(n_cells):
        parts = fh.readline().split()
        if parts[:3] != ["cell", str(c), "map"]:
            raise ValueError(f"malformed cell header for cell {c}")
        weights.append(None if parts[3:] == ["-"] else np.array([float(v) for v in parts[3:]]))
        for _ in range(n_best + n_novel):
            parts = fh.readline().split()
            s = int(parts[1]) + (n_best if parts[0] == NOVEL else 0)
            fitness[c, s] = float(parts[2])
            genes[c, s] = [float(v) for v in parts[3:]]
    return Population(genes, fitness, n_best), weights
