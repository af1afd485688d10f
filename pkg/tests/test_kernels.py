import numpy as np
import pytest

from bpwmc import catalog, kernels
from bpwmc._accel import ENV_FLAG, use_numba

GRAPHS = [catalog.cycle_graph(7), catalog.fixture("fig1").graph, catalog.p4k(2), catalog.complete_bipartite(3, 3)]


def both(monkeypatch, fn):
    monkeypatch.delenv(ENV_FLAG, raising=False)
    assert use_numba()
    fast = fn()
    monkeypatch.setenv(ENV_FLAG, "1")
    assert not use_numba()
    slow = fn()
    return fast, slow


@pytest.mark.parametrize("g", GRAPHS)
def test_independent_masks_agree(monkeypatch, g):
    fast, slow = both(monkeypatch, lambda: np.sort(kernels.independent_masks(g.adj, g.n)))
    assert np.array_equal(fast, slow)


@pytest.mark.parametrize("g", GRAPHS)
def test_vertex_separation_agrees(monkeypatch, g):
    fast, slow = both(monkeypatch, lambda: kernels.vertex_separation(g.adj, g.n))
    assert fast == slow


def test_chain_agrees(monkeypatch):
    g = catalog.fixture("fig1").graph
    rng = np.random.default_rng(5)
    up, ua = rng.random(2000), rng.random(2000)
    w = [1, 2, 1, 3, 1, 1, 2, 1, 1, 1]
    fast, slow = both(monkeypatch, lambda: kernels.run_chain(g.adj, w, 1.5, 0, up, ua))
    assert np.array_equal(np.asarray(fast), np.asarray(slow))
    assert all(g.is_independent(int(z)) for z in fast)


def test_cut_search_agrees(monkeypatch):
    rng = np.random.default_rng(1)
    k = 9
    pi = rng.random(k)
    pi /= pi.sum()
    a = rng.random((k, k))
    sym = (a + a.T) / 2
    flow = sym / sym.sum() * 0.5
    fast, slow = both(monkeypatch, lambda: kernels.min_cut_ratio(pi, flow))
    assert fast[0] == pytest.approx(slow[0], rel=1e-12)


def test_cut_search_matches_enumeration(monkeypatch):
    import itertools

    rng = np.random.default_rng(2)
    k = 7
    pi = rng.random(k)
    pi /= pi.sum()
    a = rng.random((k, k))
    flow = (a + a.T) / (a + a.T).sum()
    best = min(
        sum(flow[i, j] for i in s for j in range(k) if j not in s) / pi[list(s)].sum()
        for r in range(1, k) for s in itertools.combinations(range(k), r) if pi[list(s)].sum() <= 0.5
    )
    monkeypatch.setenv(ENV_FLAG, "1")
    assert kernels.min_cut_ratio(pi, flow)[0] == pytest.approx(best, rel=1e-12)


def test_benchmark_script_runs():
    import subprocess
    import sys
    from pathlib import Path

    script = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    proc = subprocess.run([sys.executable, str(script), "--repeat", "1"], capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.count("x\n") == 4
