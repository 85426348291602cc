import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from edcsim.coreset import (CoresetParams, adversarial_max_matching, compose_and_solve,
                            coreset_cover, edcs_coreset, fitted_lambda, gen_lowerbound_graph,
                            lowerbound_demo, maxmatching_coreset, save_coreset, union_edcs,
                            validate_union)
from edcsim.edcs import EdcsParams, validate_edcs
from edcsim.generators import gen_random_bipartite, gen_random_graph
from edcsim.graph import Graph, GraphError
from edcsim.io import read_graph
from edcsim.matching import hopcroft_karp, is_cover, is_matching
from edcsim.report import UNAVAILABLE
from edcsim.rng import Rng

P40 = CoresetParams.practice(4, 40, 36)


# -- parameters --------------------------------------------------------------------------

def test_params_schedule_and_threshold():
    with pytest.raises(ValueError):
        CoresetParams.practice(0, 4, 3)
    t = CoresetParams.theory(1000, 4, 0.1)
    ln = math.log(1000)
    lam = 1e-4 * (0.1 / ln) ** 2
    assert t.mode == "theory"
    assert t.composed_lambda == pytest.approx(ln * math.sqrt(lam))
    assert t.edcs.beta == math.ceil(750 * lam ** -3 * ln)
    assert CoresetParams.practice(4, 40, 36, eps=0.1).cover_threshold2 == 36
    assert CoresetParams.practice(4, 40, 36, eps=0.2).cover_threshold2 == 32
    assert CoresetParams.practice(4, 40, 30, eps=0.05).cover_threshold2 == 30
    assert P40.composed(0.1) == EdcsParams(176, 128)
    with pytest.raises(ValueError):
        P40.composed()


# -- maximum-matching coreset --------------------------------------------------------------

def test_maxmatching_single_part_is_optimal():
    g = gen_random_bipartite(40, 40, 0.1, 1)
    r = maxmatching_coreset(g, 1, 2)
    assert is_matching(g, hopcroft_karp(r.union))
    assert r.union.m == hopcroft_karp(g).size
    rep = compose_and_solve(r)
    assert rep.matching_ratio == 1.0


def test_maxmatching_empty_graph():
    g = Graph(10)
    r = maxmatching_coreset(g, 3, 0)
    assert all(len(p) == 0 for p in r.parts) and r.union.m == 0
    assert compose_and_solve(r).matching_ratio == 1.0
    assert compose_and_solve(r, oracle=False).as_dict()["matching_ratio"] == UNAVAILABLE


@given(st.integers(1, 30), st.integers(1, 30), st.floats(0.02, 0.5), st.integers(1, 8),
       st.integers(0, 10 ** 6))
def test_maxmatching_ratio_bounds(a, b, p, k, seed):
    g = gen_random_bipartite(a, b, p, seed)
    r = maxmatching_coreset(g, k, seed)
    for i in range(k):
        cs = r.coreset(i)
        assert cs.max_degree <= 1 and np.isin(cs.keys, g.keys).all()
    mm, got = hopcroft_karp(g).size, hopcroft_karp(r.union).size
    assert 3 * got >= mm >= got


def test_maxmatching_ratio_on_random_bipartite():
    for s in range(10):
        g = gen_random_bipartite(300, 300, 0.1, Rng(s))
        rep = compose_and_solve(maxmatching_coreset(g, 5, Rng(s)))
        assert 1 / 3 <= rep.matching_ratio <= 1


# -- EDCS coreset ---------------------------------------------------------------------------

def test_edcs_single_part_is_an_edcs():
    g = gen_random_graph(60, 0.3, 3)
    r = edcs_coreset(g, CoresetParams.practice(1, 10, 8), 4)
    assert validate_edcs(union_edcs(r, EdcsParams(10, 8))) == []


def test_edcs_single_edge_any_k():
    g = Graph(2, [(0, 1)])
    for k in (1, 3, 7):
        r = edcs_coreset(g, CoresetParams.practice(k, 2, 1), k)
        assert sum(len(p) for p in r.parts) == 1
        assert r.union == g


def test_edcs_unbinding_beta_keeps_everything():
    g = gen_random_bipartite(30, 30, 0.2, 5)
    params = CoresetParams.practice(1, 2 * g.max_degree, 2 * g.max_degree - 1)
    r = edcs_coreset(g, params, 0)
    assert r.union == g
    assert compose_and_solve(r).matching_ratio == 1.0


def test_fitted_lambda_on_random_bipartite():
    for s in range(5):
        g = gen_random_bipartite(400, 400, 0.15, Rng(s))
        r = edcs_coreset(g, P40, Rng(s))
        lam = fitted_lambda(r)
        assert lam <= 0.35
        # the fitted slack really validates, and nothing smaller at the next grid step does
        assert validate_union(r, lam) == []
        if lam > 0.02:
            assert validate_union(r, lam - 0.02) != []


def test_theory_schedule_composes():
    g = gen_random_bipartite(50, 50, 0.2, 2)
    r = edcs_coreset(g, CoresetParams.theory(g.n, 3, 0.1), 1)
    assert validate_union(r) == []


@given(st.integers(2, 40), st.floats(0.05, 1), st.integers(1, 6), st.integers(2, 20),
       st.integers(0, 10 ** 6))
def test_part_sizes_and_cover_feasibility(n, p, k, beta, seed):
    g = gen_random_graph(n, p, seed)
    params = CoresetParams.practice(k, beta, beta - 1 - seed % max(beta - 1, 1))
    r = edcs_coreset(g, params, seed)
    for i in range(k):
        part = r.coreset(i)
        assert np.isin(part.keys, g.keys).all()
        assert part.m <= n * beta / 2 and part.max_degree <= beta
    assert is_cover(g, coreset_cover(r, "matched"))
    if n <= 18:
        assert is_cover(g, coreset_cover(r, "exact"))


def test_vertex_cover_report():
    g = gen_random_bipartite(60, 60, 0.1, 9)
    r = edcs_coreset(g, CoresetParams.practice(3, 20, 18), 9)
    rep = compose_and_solve(r, "vertex_cover")
    assert rep.vc_kind == "exact" and rep.cover_size >= rep.oracle_vc
    with pytest.raises(ValueError):
        coreset_cover(maxmatching_coreset(g, 3, 9))


# -- lower-bound instance --------------------------------------------------------------------

def test_lowerbound_sizes():
    g, sides, labels = gen_lowerbound_graph(8, 4)
    assert g.n == 18 and g.m == 6 * 4 + 4 + 4
    assert np.bincount(labels).tolist() == [6, 4, 4, 4]
    assert hopcroft_karp(g, sides).size == 8
    assert hopcroft_karp(gen_lowerbound_graph(40, 4)[0]).size == 40
    with pytest.raises(GraphError):
        gen_lowerbound_graph(10, 4)


def test_adversary_examples():
    _, _, labels = gen_lowerbound_graph(8, 4)
    l1, l2, r2 = 0, 6, 14
    lone = Graph(18, [(l2, r2)])
    m, flagged = adversarial_max_matching(lone, labels)
    assert m.pairs() == [(l2, r2)] and flagged
    both = Graph(18, [(l1, r2), (l2, r2)])
    m, flagged = adversarial_max_matching(both, labels)
    assert m.pairs() == [(l1, r2)] and not flagged


def test_lowerbound_demo_small():
    row = lowerbound_demo(400, 4, 3)
    assert row["mm"] == 400
    assert row["edcs_ratio"] > row["maxmatching_ratio"]
    assert row["maxmatching_ratio"] <= 0.5 + 1 / 4 + 0.05


# -- serialization ----------------------------------------------------------------------------

def test_save_coreset(tmp_path):
    g = gen_random_bipartite(30, 30, 0.2, 1)
    r = edcs_coreset(g, CoresetParams.practice(3, 8, 6), 1)
    out = save_coreset(r, tmp_path / "cs", {"ratio": 0.9})
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["k"] == 3 and manifest["params"]["beta"] == 8 and manifest["ratio"] == 0.9
    assert manifest["communication"] == sum(manifest["coreset_sizes"])
    assert read_graph(out / "union.txt") == r.union
    assert sum(read_graph(out / f"part_{i}.txt").m for i in range(3)) == manifest["communication"]
