import math
from fractions import Fraction

import pytest

from bpwmc import catalog
from bpwmc.errors import DomainError
from bpwmc.graph import Graph, WeightedGraph
from bpwmc.independence import (
    alpha, check_real_negative_roots, enumerate_independent_sets, gibbs, independent_sets, log_concavity_report,
    profile, ratios_strictly_increasing,
)

from conftest import brute_independent_sets

SMALL = [catalog.path_graph(4), catalog.cycle_graph(5), catalog.complete_bipartite(2, 3), catalog.cube(),
         catalog.fixture("fig1").graph, catalog.p4k(2)]


@pytest.mark.parametrize("g", SMALL)
def test_enumeration_matches_brute_force(g):
    ours = {frozenset(i for i in range(g.n) if m >> i & 1) for m in independent_sets(g)}
    assert ours == set(brute_independent_sets(g))
    assert len(independent_sets(g)) == len(ours)


def test_enumeration_examples():
    groups = enumerate_independent_sets(catalog.complete_graph(3))
    assert groups == [[0], [1, 2, 4]]
    assert len(independent_sets(Graph.from_edges(2, []))) == 4
    p4 = enumerate_independent_sets(catalog.path_graph(4))
    assert sorted(p4[2]) == sorted([0b0101, 0b1001, 0b1010])


def test_state_order_is_size_then_lex():
    states = independent_sets(catalog.path_graph(4))
    keys = [(s.bit_count(), sorted(i for i in range(4) if s >> i & 1)) for s in states]
    assert keys == sorted(keys)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_complete_graph_polynomial(n):
    lam = Fraction(3, 7)
    assert profile(catalog.complete_graph(n), lam).partition() == 1 + n * lam


def test_p4_profile():
    p = profile(catalog.path_graph(4))
    assert p.counts == [1, 4, 3] and p.partition() == 8 and p.alpha == 2
    assert p.ratios == [Fraction(1, 4), Fraction(4, 3)]


def test_weighted_counts_edge():
    p = profile(WeightedGraph(catalog.path_graph(2), (2, 3)))
    assert p.weighted_counts == [1, 5]


def test_gibbs_edge_and_zero_fugacity():
    gb = gibbs(catalog.path_graph(2), 1)
    assert gb.probs == [Fraction(1, 3)] * 3
    g0 = gibbs(catalog.cycle_graph(5), 0)
    assert g0.probs[0] == 1 and sum(g0.probs[1:]) == 0


@pytest.mark.parametrize("g", SMALL)
@pytest.mark.parametrize("lam", [Fraction(1, 2), Fraction(1), Fraction(2)])
def test_partition_sandwich_and_gibbs(g, lam):
    P = profile(g, lam).partition()
    assert 1 + g.n * lam <= P <= (1 + lam) ** g.n
    if g.n * lam >= 1:
        assert P <= math.e * float(g.n * lam) ** alpha(g)
    gb = gibbs(g, lam)
    assert sum(gb.probs) == 1
    assert 1 / gb.probs[0] == P


def test_c5_roots():
    rc = check_real_negative_roots(profile(catalog.cycle_graph(5)))
    assert rc.passed
    want = sorted([(-5 - math.sqrt(5)) / 10, (-5 + math.sqrt(5)) / 10])
    got = sorted(r["re"] for r in rc.roots)
    assert got == pytest.approx(want, abs=1e-12)


def test_k1_root():
    rc = check_real_negative_roots(profile(catalog.complete_graph(1)))
    assert rc.passed and rc.roots[0]["re"] == pytest.approx(-1)


def test_claw_roots_reported_without_claim():
    # 1 + 4x + 3x^2 + x^3 has a complex pair; the report only has to say so
    rc = check_real_negative_roots(profile(catalog.complete_bipartite(1, 3)))
    assert len(rc.roots) == 3 and not rc.passed


def test_constant_polynomial_rejected():
    with pytest.raises(DomainError):
        check_real_negative_roots(profile(Graph.from_edges(0, [])))


def test_log_concavity_examples():
    assert log_concavity_report(profile(catalog.path_graph(2))).passed
    lk4 = profile(catalog.named_fixtures()["lk4"])
    rep = log_concavity_report(lk4)
    assert rep.passed and all(r["margin"] >= 0 for r in rep.adjacent)
    assert ratios_strictly_increasing(lk4)
