import numpy as np
import pytest

from edcsim.coreset import CoresetParams, compose_and_solve, edcs_coreset
from edcsim.edcs import EdcsParams
from edcsim.generators import gen_random_bipartite
from edcsim.graph import Graph
from edcsim.matching import hopcroft_karp
from edcsim.rng import Rng
from edcsim.streaming import EdgeStream, piece_count, stream_coreset


def test_piece_count():
    assert piece_count(0, 10) == 1
    assert piece_count(100, 100) == 1
    assert piece_count(1000, 10) == 10
    assert piece_count(1001, 10) == 11


def test_stream_is_forward_only():
    g = gen_random_bipartite(10, 10, 0.5, 1)
    s = EdgeStream(g, Rng(2))
    first = s.take(5)
    rest = s.take(g.m)
    assert s.exhausted() and s.consumed == g.m
    assert len(s.take(3)) == 0
    assert sorted(np.concatenate([first, rest]).tolist()) == list(range(g.m))


def test_single_piece_is_exact():
    g = gen_random_bipartite(50, 50, 0.1, 3)
    r = stream_coreset(g, g.m, variant="maxmatching", rng=4)
    assert r.k == 1 and r.report.matching_ratio == 1.0
    r = stream_coreset(g, g.m, EdcsParams(2 * g.max_degree, 2 * g.max_degree - 1), rng=4)
    assert r.union == g


def test_empty_graph():
    r = stream_coreset(Graph(5), 5, EdcsParams(4, 3), rng=0)
    assert r.union.m == 0 and r.peak_space == 0 and r.k == 1


def test_small_target_rejected():
    g = gen_random_bipartite(5, 5, 0.5, 0)
    with pytest.raises(ValueError):
        stream_coreset(g, 9, EdcsParams(4, 3))
    with pytest.raises(ValueError):
        stream_coreset(g, 10, None)


@pytest.mark.parametrize("variant", ["edcs", "maxmatching"])
def test_pieces_and_space(variant):
    g = gen_random_bipartite(100, 100, 0.2, 5)
    params = EdcsParams(10, 9)
    r = stream_coreset(g, g.n, params, Rng(5), variant)
    assert r.consumed == g.m == sum(r.piece_sizes)
    assert r.piece_sizes[:-1] == [g.m // r.k] * (r.k - 1)
    assert r.peak_space >= max(r.piece_sizes)
    assert r.peak_space <= g.m // r.k + g.m % r.k + r.k * g.n * params.beta / 2
    assert r.union.m <= r.peak_space


def test_stream_matches_random_partition_in_distribution():
    beta = EdcsParams(6, 5)
    stream, batch = [], []
    for s in range(50):
        g = gen_random_bipartite(150, 150, 0.1, Rng(s))
        r = stream_coreset(g, g.n, beta, Rng(s))
        stream.append(r.report.matching_ratio)
        c = edcs_coreset(g, CoresetParams(r.k, beta), Rng(s))
        batch.append(compose_and_solve(c).matching_ratio)
    assert abs(np.mean(stream) - np.mean(batch)) <= 0.05


def test_report_fields():
    g = gen_random_bipartite(40, 40, 0.2, 6)
    r = stream_coreset(g, g.n, EdcsParams(8, 7), Rng(6), instance="bip")
    d = r.report.as_dict()
    assert d["instance"] == "bip" and d["algorithm"] == "stream-edcs"
    assert d["oracle_mm"] == hopcroft_karp(g).size
    assert r.report.resources["peak_space"] == r.peak_space
