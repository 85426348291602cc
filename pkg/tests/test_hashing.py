import numpy as np
import pytest
from scipy.stats import chisquare

from edcsim.hashing import (MERSENNE_31, MERSENNE_61, KWiseHash, kwise_hash_eval,
                            kwise_hash_new, membership_matrix)
from edcsim.rng import Rng


def test_constant_polynomial():
    h = KWiseHash(1, MERSENNE_61, (12345,), 7)
    assert {kwise_hash_eval(h, x) for x in range(50)} == {12345 % 7}


def test_unit_range_is_zero():
    h = kwise_hash_new(4, 1, 3)
    assert all(h(x) == 0 for x in range(20))
    assert not h.eval_many(np.arange(20)).any()


def test_range_above_field_rejected():
    with pytest.raises(ValueError):
        kwise_hash_new(2, 1 << 62, 0)


def test_evaluation_is_deterministic():
    h = kwise_hash_new(5, 101, 11)
    assert [h(x) for x in range(30)] == [h(x) for x in range(30)]


def test_pairwise_independence_monte_carlo():
    hits = 0
    for s in range(100_000):
        h = kwise_hash_new(2, 2, Rng(s))
        hits += h(0) == 0 and h(1) == 0
    assert abs(hits / 100_000 - 0.25) <= 0.01


@pytest.mark.parametrize("range_", [2, 16, 101])
def test_chi_square_uniformity_over_inputs(range_):
    h = kwise_hash_new(4, range_, Rng(range_))
    values = np.array([kwise_hash_eval(h, x) for x in range(100_000)])
    counts = np.bincount(values, minlength=range_)
    assert chisquare(counts).pvalue > 0.001


@pytest.mark.parametrize("range_", [2, 16, 101])
def test_chi_square_uniformity_over_draws(range_):
    # one vertex-hash per row, evaluated at a fixed machine index
    rng = Rng(1000 + range_)
    values = []
    for s in range(100_000):
        values.append(kwise_hash_eval(kwise_hash_new(3, range_, rng.child(s)), 7))
    counts = np.bincount(values, minlength=range_)
    assert chisquare(counts).pvalue > 0.001


def test_membership_matrix_rate_and_pairs():
    m = membership_matrix(100_000, 2, 2, 2, Rng(4))
    assert abs(m[:, 0].mean() - 0.5) < 0.01
    assert abs((m[:, 0] & m[:, 1]).mean() - 0.25) < 0.01


def test_membership_matrix_matches_scalar_hash():
    m = membership_matrix(5, 9, 3, 4, Rng(8))
    coeffs = Rng(8).gen.integers(0, MERSENNE_31, size=(5, 3), dtype=np.int64)
    for v in range(5):
        h = KWiseHash(3, MERSENNE_31, tuple(int(c) for c in coeffs[v]), 4)
        assert m[v].tolist() == [h(i) == 0 for i in range(9)]
    assert membership_matrix(3, 4, 3, 1, Rng(0)).all()
