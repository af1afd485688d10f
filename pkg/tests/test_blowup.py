import math

import networkx as nx
import numpy as np
import pytest

from bpwmc import catalog
from bpwmc.blowup import blow_up, expandability_check, fibre_sizes, lumped_transition_matrix, project, verify_equivalence
from bpwmc.errors import DomainError
from bpwmc.glauber import transition_matrix
from bpwmc.graph import Graph, WeightedGraph, bits
from bpwmc.independence import alpha, independent_sets
from bpwmc.pathdecomp import bipartite_pathwidth
from bpwmc.recognizers import detect_pattern
from bpwmc.verify import random_weighted


def test_fig5_target():
    bm = blow_up(catalog.fixture("fig5"))
    # cliques: a 1 + b 1 + c 3 edges; joins a-c 6, b-c 6, d-c 3
    assert bm.target.n == 8 and bm.target.m == 20
    assert [len(c) for c in bm.clique_of] == [2, 2, 3, 1]
    assert bm.target.labels[:3] == ("a1", "a2", "b1")


def test_adjacency_rule():
    wg = catalog.fixture("fig5")
    bm = blow_up(wg)
    t = bm.target
    for x in range(t.n):
        for y in range(x + 1, t.n):
            u, v = bm.owner[x], bm.owner[y]
            assert t.has_edge(x, y) == (u == v or wg.graph.has_edge(u, v))


def test_unit_weights_and_single_vertex():
    g = catalog.fixture("fig1").graph
    assert nx.is_isomorphic(blow_up(g).target.to_networkx(), g.to_networkx())
    k3 = blow_up(Graph.from_edges(1, []), [3]).target
    assert k3.n == 3 and k3.m == 3


def test_projection_and_fibres():
    wg = catalog.fixture("fig5")
    bm = blow_up(wg)
    assert project(bm, 0) == 0
    assert project(bm, 1 << bm.clique_of[2][1]) == 1 << 2
    with pytest.raises(DomainError):
        project(bm, 0b11)
    fib = fibre_sizes(bm)
    assert set(fib) == set(independent_sets(wg.graph))
    for s, count in fib.items():
        assert count == math.prod(wg.weights[v] for v in bits(s))


def test_equivalence_random():
    rng = np.random.default_rng(11)
    for _ in range(40):
        wg = random_weighted(rng)
        rep = verify_equivalence(wg)
        assert rep["pass"] and rep["alpha_target"] == rep["alpha_source"] == alpha(wg.graph)
        # independent count: number of blow-up sets of each size, directly
        sizes = np.bincount([s.bit_count() for s in independent_sets(blow_up(wg).target)])
        assert [r["target"] for r in rep["per_k"]] == sizes.tolist()


def test_expandability():
    rep = expandability_check([catalog.complete_graph(3), catalog.complete_graph(5)])
    assert not rep["expandable"]
    assert all(v.counterexample is not None for v in rep["verdicts"])
    cycles = expandability_check([catalog.cycle_graph(k) for k in (4, 5, 6)])
    assert cycles["expandable"] and all(not v.true_twins for v in cycles["verdicts"])


def test_pattern_freeness_transfers():
    # claw and C4 have no true twins
    rng = np.random.default_rng(3)
    pats = [catalog.complete_bipartite(1, 3), catalog.cycle_graph(4)]
    for _ in range(40):
        wg = random_weighted(rng, max_n=5, max_w=2)
        t = blow_up(wg).target
        for p in pats:
            assert (detect_pattern(wg.graph, p) is None) == (detect_pattern(t, p) is None)


@pytest.mark.parametrize("name", ["c5", "c6", "p4k1", "q3"])
def test_bpw_class_expandable(name):
    g = catalog.named_fixtures()[name]
    p = bipartite_pathwidth(g)
    rng = np.random.default_rng(len(name))
    for _ in range(3):
        w = tuple(int(x) for x in rng.integers(1, 3, size=g.n))
        t = blow_up(g, w).target
        if t.n <= 12:
            assert bipartite_pathwidth(t) <= p


@pytest.mark.parametrize("wg", [catalog.fixture("fig5"), WeightedGraph(catalog.path_graph(3), (2, 1, 3)),
                                WeightedGraph(catalog.cycle_graph(4), (1, 2, 2, 1))])
@pytest.mark.parametrize("lam", [1, 2])
def test_weighted_chain_is_lumped_blowup_chain(wg, lam):
    lumped = lumped_transition_matrix(blow_up(wg), lam)
    tm = transition_matrix(wg, lam)
    direct = {(a, tm.states[j]): p for a, row in zip(tm.states, tm.rows) for j, p in row.items() if p}
    assert lumped == direct
