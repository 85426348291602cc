import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from edcsim.coreset import gen_lowerbound_graph
from edcsim.generators import (gen_complete_bipartite, gen_cycle, gen_path, gen_petersen,
                               gen_random_bipartite, gen_random_graph, gen_star)
from edcsim.graph import Graph, GraphError
from edcsim.matching import (Matching, OracleTooLarge, VertexCover, check_duality,
                             exact_mm_bruteforce, exact_vc_bruteforce, exact_vertex_cover,
                             greedy_maximal_matching, hopcroft_karp, is_cover, is_matching,
                             konig_vertex_cover, maximum_matching, vizing_lower_bound)

# frozen oracle values; the enumeration tests below re-derive them
PETERSEN_MM = 5
C5_VC = 3
K4_MM = 2


def enum_mm(g: Graph) -> int:
    edges = g.edge_list()
    for size in range(len(edges), 0, -1):
        for combo in itertools.combinations(edges, size):
            verts = [v for e in combo for v in e]
            if len(set(verts)) == len(verts):
                return size
    return 0


def enum_vc(g: Graph) -> int:
    for size in range(g.n + 1):
        for combo in itertools.combinations(range(g.n), size):
            s = set(combo)
            if all(u in s or v in s for u, v in g.edge_list()):
                return size
    return g.n


def test_frozen_oracles_by_enumeration():
    assert enum_mm(gen_petersen()) == PETERSEN_MM
    assert enum_vc(gen_cycle(5)) == C5_VC
    assert enum_mm(Graph.complete(4)) == K4_MM


# -- greedy -------------------------------------------------------------------------

def test_greedy_examples():
    assert greedy_maximal_matching(Graph(4)).size == 0
    assert greedy_maximal_matching(Graph(2, [(0, 1)])).pairs() == [(0, 1)]
    path = gen_path(3)
    assert greedy_maximal_matching(path, [(0, 1), (1, 2)]).pairs() == [(0, 1)]
    assert greedy_maximal_matching(path, [(1, 2), (0, 1)]).pairs() == [(1, 2)]


@given(st.integers(2, 16), st.floats(0, 1), st.integers(0, 10 ** 6))
def test_greedy_is_maximal_and_half_optimal(n, p, seed):
    g = gen_random_graph(n, p, seed)
    m = greedy_maximal_matching(g)
    assert is_matching(g, m)
    assert is_cover(g, VertexCover.of(m.vertices))
    best = exact_mm_bruteforce(g)
    assert 2 * m.size >= best >= m.size


# -- exact oracles -------------------------------------------------------------------------

def test_hopcroft_karp_examples():
    assert hopcroft_karp(gen_complete_bipartite(3, 3)).size == 3
    p4 = gen_path(4)
    assert hopcroft_karp(p4, np.array([0, 1, 0, 1])).size == 2
    g, sides, _ = gen_lowerbound_graph(40, 4)
    assert hopcroft_karp(g, sides).size == 40


def test_hopcroft_karp_rejects_non_bipartite_coloring():
    with pytest.raises(GraphError):
        hopcroft_karp(gen_cycle(3), np.array([0, 1, 1]))


def test_bruteforce_examples():
    assert exact_mm_bruteforce(gen_cycle(3)) == 1
    assert exact_mm_bruteforce(Graph.complete(4)) == K4_MM
    assert exact_mm_bruteforce(gen_petersen()) == PETERSEN_MM
    assert exact_vc_bruteforce(gen_star(5)).vertices.tolist() == [0]
    assert exact_vc_bruteforce(gen_cycle(3)).size == 2
    assert exact_vc_bruteforce(gen_cycle(5)).size == C5_VC


def test_oracle_cap(monkeypatch):
    g = gen_random_graph(40, 0.5, 1)
    with pytest.raises(OracleTooLarge, match="oracle too large"):
        exact_mm_bruteforce(g)
    monkeypatch.setenv("EDCS_ORACLE_CAP", "2,2")
    with pytest.raises(OracleTooLarge):
        exact_mm_bruteforce(gen_petersen())


@given(st.integers(1, 7), st.integers(1, 7), st.floats(0, 1), st.integers(0, 10 ** 6))
def test_hopcroft_karp_agrees_with_bruteforce(a, b, p, seed):
    g = gen_random_bipartite(a, b, p, seed)
    m = hopcroft_karp(g)
    assert is_matching(g, m)
    # strip the coloring so dispatch cannot fall back to the bipartite solver
    assert m.size == exact_mm_bruteforce(Graph(g.n, g.edges))
    cover = konig_vertex_cover(g)
    assert is_cover(g, cover) and cover.size == m.size


@given(st.integers(1, 11), st.floats(0, 1), st.integers(0, 10 ** 6))
def test_matching_cover_duality_on_oracles(n, p, seed):
    g = gen_random_graph(n, p, seed)
    mm = exact_mm_bruteforce(g)
    vc = exact_vc_bruteforce(g)
    assert is_cover(g, vc)
    assert mm <= vc.size <= 2 * mm
    assert vc.size == enum_vc(g)


def test_maximum_matching_dispatch():
    assert maximum_matching(gen_complete_bipartite(2, 3)).size == 2
    assert maximum_matching(gen_petersen()).size == 5
    with pytest.raises(ValueError):
        maximum_matching(gen_petersen(), "blossom")
    assert exact_vertex_cover(gen_complete_bipartite(2, 5)).size == 2


# -- feasibility and certificates ---------------------------------------------------------------

def test_feasibility_examples():
    tri = gen_cycle(3)
    assert not is_cover(tri, VertexCover.of([0]))
    assert is_cover(tri, VertexCover.of(range(3)))
    assert not is_matching(gen_path(3), Matching.from_pairs([(0, 1), (1, 2)]))
    assert not is_matching(gen_path(3), Matching.from_pairs([(0, 2)]))


def test_check_duality_examples():
    assert check_duality(5, 10, 2)
    assert not check_duality(5, 11, 2)
    g = gen_random_graph(30, 0.2, 4)
    m = greedy_maximal_matching(g)
    assert check_duality(m, VertexCover.of(m.vertices), 2)


def test_vizing_lower_bound_examples():
    assert vizing_lower_bound(1, 1, 2) == Fraction(1, 2)
    assert vizing_lower_bound(9, Fraction(1, 2), 20) == Fraction(9, 2)
    assert vizing_lower_bound(5, 1, 0) == 0
