import itertools

import networkx as nx
import pytest

from bpwmc import catalog
from bpwmc.graph import Graph, bipartition, bits, induced_subgraph
from bpwmc.independence import independent_sets
from bpwmc.recognizers import (
    PATTERNS, bpw_upper_bound, class_report, classify_forkfree_bipartite, detect_pattern, has_hole, is_monotone,
    psi,
)

SMALL = list(catalog.connected_graphs(6, min_n=4))[::5]


def brute_induced(g: Graph, pat: Graph) -> bool:
    pn = pat.to_networkx()
    for s in itertools.combinations(range(g.n), pat.n):
        h, _ = induced_subgraph(g, sum(1 << v for v in s))
        if h.m == pat.m and nx.is_isomorphic(h.to_networkx(), pn):
            return True
    return False


def brute_psi(g: Graph) -> int:
    best = 0
    for d in range(1, g.n // 2 + 1):
        for s in itertools.combinations(range(g.n), d):
            common = g.full
            for v in s:
                common &= g.adj[v]
            if common.bit_count() >= d:
                best = d
                break
    return best


def brute_staircase(g: Graph) -> bool:
    rows, cols = (bits(s) for s in bipartition(g))
    for pr in itertools.permutations(rows):
        for pc in itertools.permutations(cols):
            ok = all(
                not (g.has_edge(pr[i], pc[jj]) and g.has_edge(pr[k], pc[j]))
                or (g.has_edge(pr[i], pc[j]) and g.has_edge(pr[k], pc[jj]))
                for i in range(len(pr)) for k in range(i + 1, len(pr))
                for j in range(len(pc)) for jj in range(j + 1, len(pc))
            )
            if ok:
                return True
    return False


def test_pattern_examples():
    assert detect_pattern(catalog.complete_bipartite(1, 3), "claw") == {0: 0, 1: 1, 2: 2, 3: 3}
    assert detect_pattern(catalog.cycle_graph(6), "claw") is None
    assert detect_pattern(PATTERNS["tripod"], "tripod") is not None


@pytest.mark.parametrize("name", sorted(PATTERNS))
@pytest.mark.parametrize("g", SMALL + [catalog.cube(), catalog.fixture("fig1").graph])
def test_patterns_match_brute_force(name, g):
    emb = detect_pattern(g, name)
    assert (emb is not None) == brute_induced(g, PATTERNS[name])
    if emb is not None:
        pat = PATTERNS[name]
        for a, b in itertools.combinations(range(pat.n), 2):
            assert pat.has_edge(a, b) == g.has_edge(emb[a], emb[b])


@pytest.mark.parametrize("g", SMALL + [catalog.cycle_graph(5), catalog.cycle_graph(4), catalog.cube()])
def test_holes_match_chordless_cycles(g):
    want = any(len(c) >= 5 for c in nx.chordless_cycles(g.to_networkx()))
    hole = has_hole(g)
    assert (hole is not None) == want
    if hole is not None:
        h, _ = induced_subgraph(g, sum(1 << v for v in hole))
        assert h.m == len(hole) and all(h.degree(v) == 2 for v in range(h.n))


def test_hole_examples():
    assert has_hole(catalog.cycle_graph(5)) is not None
    assert has_hole(catalog.cycle_graph(4)) is None


@pytest.mark.parametrize("name", ["q3", "bw3", "p4k2", "c6"])
def test_fast_graph_minus_neighbourhood_hole_free(name):
    g = catalog.named_fixtures()[name]
    assert class_report(g).fast
    for w in range(g.n):
        h, _ = induced_subgraph(g, g.full & ~g.adj[w])
        assert has_hole(h) is None


def test_monotone_examples():
    k = catalog.complete_bipartite(2, 3)
    assert is_monotone(k) is not None
    assert is_monotone(catalog.cycle_graph(8)) is None
    # C6: the 2x2 characterisation rules it out, whatever the row order
    assert is_monotone(catalog.cycle_graph(6)) is None


@pytest.mark.parametrize("g", [catalog.cycle_graph(6), catalog.path_graph(5), catalog.complete_bipartite(2, 2),
                               catalog.p4k(1), catalog.fixture("fig6_d1").graph] + [
    h for h in catalog.connected_bipartite_graphs(6)][::4])
def test_monotone_matches_permutation_oracle(g):
    assert (is_monotone(g) is not None) == brute_staircase(g)


@pytest.mark.parametrize("g, want", [
    (catalog.complete_bipartite(3, 3), 3), (catalog.cycle_graph(6), 1), (catalog.cube(), 2),
])
def test_psi_examples(g, want):
    assert psi(g) == want == brute_psi(g)


@pytest.mark.parametrize("d", [1, 2])
def test_psi_circulant(d):
    assert psi(catalog.fig6_for(d)) == (2 * d) // 2


@pytest.mark.parametrize("g", SMALL)
def test_psi_oracle(g):
    assert psi(g) == brute_psi(g)


def test_classifier_examples():
    assert classify_forkfree_bipartite(catalog.cycle_graph(8))[0] == "even cycle"
    assert classify_forkfree_bipartite(catalog.cube())[0] == "cube"
    k = catalog.complete_bipartite(3, 3)
    minus = Graph.from_edges(6, [e for e in k.edges() if e != (0, 3)])
    assert classify_forkfree_bipartite(minus)[0] == "biclique minus matching"
    assert classify_forkfree_bipartite(catalog.bw3())[0] == "BW*3"
    # removing a perfect matching from K33 leaves C6; with one hub it is BW*3
    k34 = catalog.complete_bipartite(3, 4)
    h = Graph.from_edges(7, [e for e in k34.edges() if e not in {(0, 3), (1, 4), (2, 5)}])
    assert classify_forkfree_bipartite(h)[0] == "BW*3"


@pytest.mark.parametrize("a, b", [(4, 4), (4, 5), (5, 5), (6, 4)])
def test_biclique_minus_three_matching_is_fork_free(a, b):
    k = catalog.complete_bipartite(a, b)
    drop = {(0, a), (1, a + 1), (2, a + 2)}
    h = Graph.from_edges(a + b, [e for e in k.edges() if e not in drop])
    assert detect_pattern(h, "fork") is None
    assert classify_forkfree_bipartite(h)[0] == "biclique minus 3-matching"
    bound, source = bpw_upper_bound(h)
    from bpwmc.pathdecomp import bipartite_pathwidth
    assert source == "fork-free" and bipartite_pathwidth(h) <= bound


def test_classifier_reports_fork():
    label, emb = classify_forkfree_bipartite(PATTERNS["fork"])
    assert label == "contains fork" and emb is not None


@pytest.mark.parametrize("name, want", [("c5", 2), ("q3", 4), ("interval", 2)])
def test_bpw_upper_bound_examples(name, want):
    bound, _ = bpw_upper_bound(catalog.named_fixtures()[name])
    assert bound == want


@pytest.mark.parametrize("g", SMALL + list(catalog.named_fixtures().values()))
def test_claw_free_implies_fork_free(g):
    rep = class_report(g)
    assert not rep.claw_free or rep.fork_free
    assert (rep.psi is not None) == (g.m > 0)


@pytest.mark.parametrize("name", ["c5", "lk4", "c7", "lk33"])
def test_claw_free_symmetric_difference_degree(name):
    g = catalog.named_fixtures()[name]
    if not class_report(g).claw_free:
        pytest.skip("not claw-free")
    states = independent_sets(g)
    for x in states:
        for y in states:
            d = x ^ y
            assert all((g.adj[v] & d).bit_count() <= 2 for v in bits(d))


def test_claw_free_catalog_keeps_wl_collisions():
    # line88 and line90 share a WL hash but are not isomorphic
    from bpwmc.verify import claw_free_catalog

    cat = dict(claw_free_catalog(9))
    a, b = cat["line88"].to_networkx(), cat["line90"].to_networkx()
    assert nx.weisfeiler_lehman_graph_hash(a) == nx.weisfeiler_lehman_graph_hash(b)
    assert not nx.is_isomorphic(a, b)
    assert all(detect_pattern(g, "claw") is None for g in cat.values())
