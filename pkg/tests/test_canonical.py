from collections import defaultdict
from fractions import Fraction

import pytest

from bpwmc import catalog
from bpwmc.canonical import (
    PathLoads, build_path, congestion, congestion_bound, decode, encoding_independent_at_boundaries, sweep,
    verify_R_bound,
)
from bpwmc.errors import DecodeError, DomainError
from bpwmc.glauber import transition_matrix
from bpwmc.independence import alpha, gibbs, independent_sets
from bpwmc.pathdecomp import bipartite_pathwidth
from bpwmc.verify import FIG1_BAGS, FIG1_X, FIG1_Y, fig1_table_check

GRAPHS = [catalog.path_graph(4), catalog.cycle_graph(5), catalog.cycle_graph(6), catalog.complete_bipartite(2, 3),
          catalog.p4k(2), catalog.cube()]


def all_pairs(g):
    states = independent_sets(g)
    return [(x, y) for x in states for y in states]


def test_fig1_worked_table():
    ok, mismatches = fig1_table_check()
    assert ok, mismatches


def test_fig1_path_endpoints_and_length():
    g = catalog.fixture("fig1").graph
    x, y = g.mask_of(FIG1_X), g.mask_of(FIG1_Y)
    path = build_path(g, x, y, {x ^ y: FIG1_BAGS})
    assert len(path) == 10
    assert path.states[0] == x and path.states[-1] == y and path.final_w == x


def test_empty_path_and_bad_input():
    g = catalog.path_graph(3)
    assert len(build_path(g, 0b101, 0b101)) == 0
    with pytest.raises(DomainError):
        build_path(g, 0b011, 0)


def test_single_insertion_decodes():
    g = catalog.path_graph(3)
    path = build_path(g, 0, 0b010)
    (s,) = path.steps
    assert s.insert and decode(g, s.z, s.z_next, s.w, s.r) == (0, 0b010)


@pytest.mark.parametrize("g", GRAPHS)
def test_path_invariants(g):
    tm = transition_matrix(g, 1)
    a = alpha(g)
    for x, y in all_pairs(g):
        path = build_path(g, x, y, trace=True)
        assert len(path) <= 2 * a
        assert path.states[0] == x and path.states[-1] == y
        for s in path.steps:
            assert tm.prob(s.z, s.z_next) > 0
            assert (s.z ^ s.z_next).bit_count() == 1 and (s.z ^ s.z_next) & (x ^ y)
            r = s.r
            assert (s.z ^ s.w) & r == 0
            assert (s.z ^ s.w) | r == x ^ y
            assert s.z & s.w == x & y
            assert s.z.bit_count() + s.w.bit_count() + r.bit_count() == x.bit_count() + y.bit_count()
            assert r & ~s.bag == 0
        assert encoding_independent_at_boundaries(g, path)


def test_encoding_can_be_dependent_mid_bag():
    # deleting 0 sends it straight to W while 1 still waits in W: W = {0,1}
    g = catalog.path_graph(2)
    path = build_path(g, 0b01, 0b10, trace=True)
    mids = [ev[4] for ev in path.trace if ev[0] == "step"]
    assert any(not g.is_independent(w) for w in mids)
    assert encoding_independent_at_boundaries(g, path)


@pytest.mark.parametrize("g", GRAPHS)
def test_decoder_round_trip_and_injectivity(g):
    owners = defaultdict(dict)
    for x, y in all_pairs(g):
        for s in build_path(g, x, y).steps:
            assert decode(g, s.z, s.z_next, s.w, s.r, validate=False) == (x, y)
            key = (s.w, s.r)
            prev = owners[(s.z, s.z_next)].setdefault(key, (x, y))
            assert prev == (x, y)


def test_decoder_rejects_inconsistent_tuple():
    g = catalog.path_graph(3)
    with pytest.raises(DecodeError):
        decode(g, 0, 0b011, 0, 0)
    with pytest.raises(DecodeError):
        decode(g, 0, 0b001, 0b001, 0b001)


@pytest.mark.parametrize("g", GRAPHS[:4])
def test_sweep_passes(g):
    rep = sweep(g, bipartite_pathwidth(g))
    assert rep.passed and rep.l_max <= 2 * rep.alpha


def brute_rho(g, lam):
    lam = Fraction(lam)
    gb = gibbs(g, lam)
    pi = dict(zip(gb.states, gb.probs))
    tm = transition_matrix(g, lam)
    load = defaultdict(Fraction)
    for x, y in all_pairs(g):
        for s in build_path(g, x, y).steps:
            load[(s.z, s.z_next)] += pi[x] * pi[y]
    return max(v / (pi[z] * tm.prob(z, zn)) for (z, zn), v in load.items())


def test_congestion_k1():
    assert congestion(catalog.complete_graph(1), 1).rho == 1


@pytest.mark.parametrize("g", GRAPHS[:4] + [catalog.fixture("fig5")])
@pytest.mark.parametrize("lam", [Fraction(1, 2), 1, 2])
def test_congestion_against_direct_sum(g, lam):
    plain = g.graph if hasattr(g, "graph") else g
    loads = PathLoads(g)
    rep = congestion(g, lam, loads=loads)
    if plain is g:
        assert rep.rho == brute_rho(g, lam)
    p = bipartite_pathwidth(plain)
    assert rep.passed and float(rep.rho) <= congestion_bound(plain.n, p, lam)
    assert rep.relaxation_ok and rep.l_max <= 2 * alpha(plain)


def test_r_bound_tightness_on_p4k2():
    g = catalog.p4k(2)
    A, B, C, D = (g.mask_of(f"{s}{i}" for i in range(2)) for s in "ABCD")
    path = build_path(g, A | C, B | D)
    big = [s for s in path.steps if s.r == B | C]
    assert big and big[0].r.bit_count() == 4
    rep = verify_R_bound(g, 3)
    assert rep.passed and rep.max_r == 4 and rep.tight_steps > 0


@pytest.mark.parametrize("g", [catalog.complete_graph(2), catalog.cycle_graph(6), catalog.fixture("fig1").graph])
def test_r_bound(g):
    p = bipartite_pathwidth(g)
    rep = verify_R_bound(g, p)
    assert rep.passed
    if g.n == 2:
        assert rep.max_r <= 1


def test_r_bound_reports_counterexample():
    rep = verify_R_bound(catalog.p4k(2), 2)
    assert not rep.passed and set(rep.counterexample) >= {"X", "Y", "Z", "W", "R+", "R-", "bag"}
