import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from notc.genome import DeParams, MlpSpec, chromosome_length, de_trial, forward, index_copy, random_chromosome

from oracles import mlp_forward

SPEC = MlpSpec(2, 10, 1)


def test_chromosome_length():
    assert chromosome_length(SPEC) == 41
    assert chromosome_length(MlpSpec(3, 4, 2)) == (3 * 4 + 4) + (4 * 2 + 2)


def test_zero_chromosome_gives_zero_output():
    assert forward(SPEC, np.zeros(41), [0.3, -7.0]).tolist() == [0.0]


def test_single_hidden_unit():
    spec = MlpSpec(2, 1, 1)
    genes = np.array([1.0, 0.0, 0.0, 1.0, 0.0])  # W1, b1, W2, b2
    assert forward(spec, genes, [0.5, 9.0])[0] == pytest.approx(0.46211715726, abs=1e-11)
    assert forward(spec, genes, [0.5, 9.0])[0] == math.tanh(0.5)


@given(st.integers(1, 4), st.integers(1, 12), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_forward_matches_scalar_oracle(n_in, n_hidden, n_out, seed):
    spec = MlpSpec(n_in, n_hidden, n_out)
    rng = np.random.default_rng(seed)
    genes = rng.normal(size=spec.length) * 2
    x = rng.normal(size=n_in)
    np.testing.assert_allclose(forward(spec, genes, x), mlp_forward(genes.tolist(), n_in, n_hidden, n_out, x.tolist()), rtol=1e-12, atol=1e-12)


def test_output_is_linear_in_output_weights():
    rng = np.random.default_rng(3)
    genes = rng.uniform(-1, 1, 41)
    x = [0.2, 0.7]
    base = forward(SPEC, genes, x)[0]
    scaled = genes.copy()
    scaled[30:] *= 3.0  # W2 and b2
    assert forward(SPEC, scaled, x)[0] == pytest.approx(3.0 * base, rel=1e-12)


def test_forward_length_checks():
    with pytest.raises(ValueError):
        forward(SPEC, np.zeros(40), [0.0, 0.0])
    with pytest.raises(ValueError):
        forward(SPEC, np.zeros(41), [0.0])


def test_random_chromosome():
    a = random_chromosome(SPEC, np.random.default_rng(5))
    b = random_chromosome(SPEC, np.random.default_rng(5))
    np.testing.assert_array_equal(a, b)
    assert a.shape == (41,)
    assert np.all((a >= -1) & (a <= 1))


class TestDeTrial:
    def test_zero_difference_full_crossover_returns_r1(self):
        rng = np.random.default_rng(0)
        base, r1, r2 = rng.normal(size=(3, 41))
        out = de_trial(base, r1, r2, r2.copy(), DeParams(1.0), rng)
        np.testing.assert_array_equal(out, r1)

    def test_no_crossover_changes_exactly_one_gene(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            base, r1, r2, r3 = rng.normal(size=(4, 41))
            out = de_trial(base, r1, r2, r3, DeParams(0.0), rng, f=0.7)
            changed = np.flatnonzero(out != base)
            assert changed.size == 1
            j = changed[0]
            assert out[j] == r1[j] + 0.7 * (r2[j] - r3[j])

    def test_scalar_example(self):
        out = de_trial([0, 0], [1, 1], [2, 0], [1, 0], DeParams(1.0), np.random.default_rng(0), f=0.5)
        assert out.tolist() == [1.5, 1.0]

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            de_trial(np.zeros(3), np.zeros(3), np.zeros(2), np.zeros(3), DeParams(), np.random.default_rng(0))

    @given(st.floats(0, 1), st.integers(0, 2**32 - 1))
    def test_genes_come_from_base_or_mutant(self, cr, seed):
        rng = np.random.default_rng(seed)
        base, r1, r2, r3 = rng.normal(size=(4, 41))
        f = rng.uniform(0, 2)
        out = de_trial(base, r1, r2, r3, DeParams(cr), rng, f=f)
        mutant = r1 + f * (r2 - r3)
        assert out.shape == base.shape
        assert np.all((out == base) | (out == mutant))
        assert np.all(np.isfinite(out))

    def test_differential_weight_drawn_in_range(self):
        rng = np.random.default_rng(2)
        base = np.zeros(1)
        for _ in range(200):
            # r1 = 0, r2 - r3 = 1: the mutant gene equals F itself
            out = de_trial(base, [0.0], [1.0], [0.0], DeParams(1.0, 0.0, 2.0), rng)
            assert 0.0 <= out[0] <= 2.0

    def test_params_validation(self):
        with pytest.raises(ValueError):
            DeParams(1.5)
        with pytest.raises(ValueError):
            DeParams(0.2, 2.0, 1.0)


class TestIndexCopy:
    def test_singleton(self):
        pop = [np.arange(5.0)]
        np.testing.assert_array_equal(index_copy(pop, np.random.default_rng(0)), pop[0])

    def test_copy_is_independent(self):
        pop = [np.arange(5.0)]
        out = index_copy(pop, np.random.default_rng(0))
        out[0] = 99.0
        assert pop[0][0] == 0.0

    def test_empty(self):
        with pytest.raises(ValueError):
            index_copy([], np.random.default_rng(0))

    def test_uniform_selection(self):
        rng = np.random.default_rng(11)
        pop = [np.full(3, float(i)) for i in range(4)]
        draws = np.array([index_copy(pop, rng)[0] for _ in range(10_000)])
        freq = np.bincount(draws.astype(int), minlength=4) / draws.size
        assert np.all(np.abs(freq - 0.25) <= 0.02)
