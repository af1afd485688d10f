"""Test catalog: small connected graphs and the named fixture families."""

from __future__ import annotations

import os
from functools import lru_cache
from itertools import permutations
from pathlib import Path

import networkx as nx

from .graph import Graph, WeightedGraph, is_connected, load_graph_file

FIXTURE_DIR = Path(__file__).with_name("fixtures")


def fixture_dir() -> Path:
    return Path(os.environ.get("BPW_FIXTURES", FIXTURE_DIR))


def fixture(name: str) -> WeightedGraph:
    path = fixture_dir() / (name if name.endswith(".txt") else name + ".txt")
    return load_graph_file(path)


def from_nx(g: nx.Graph, labels=None) -> Graph:
    nodes = list(g.nodes())
    pos = {v: i for i, v in enumerate(nodes)}
    if labels is None and not all(isinstance(v, int) and v == i for i, v in enumerate(nodes)):
        labels = [str(v) for v in nodes]
    return Graph.from_edges(len(nodes), [(pos[u], pos[v]) for u, v in g.edges()], labels)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def p4k(k: int) -> Graph:
    """P4 with each vertex blown up into an independent k-set: parts A, B, C, D
    (vertices 0..k-1, k..2k-1, ...) and complete joins A-B, B-C, C-D."""
    edges = []
    for part in range(3):
        for i in range(k):
            for j in range(k):
                edges.append((part * k + i, (part + 1) * k + j))
    labels = [f"{'ABCD'[v // k]}{v % k}" for v in range(4 * k)]
    return Graph.from_edges(4 * k, edges, labels)


def cube() -> Graph:
    return from_nx(nx.convert_node_labels_to_integers(nx.hypercube_graph(3)))


def bw3(b: int = 1) -> Graph:
    """6-cycle 0..5 plus b hubs adjacent to the even rim vertices."""
    edges = [(i, (i + 1) % 6) for i in range(6)]
    for h in range(b):
        edges += [(6 + h, 0), (6 + h, 2), (6 + h, 4)]
    return Graph.from_edges(6 + b, edges)


def line_graph(g: nx.Graph) -> Graph:
    """Line graph with vertices in sorted edge order, labelled ``u-v``."""
    lg = nx.line_graph(g)
    nodes = sorted(tuple(sorted(e)) for e in lg.nodes())
    pos = {e: i for i, e in enumerate(nodes)}
    edges = [(pos[tuple(sorted(a))], pos[tuple(sorted(b))]) for a, b in lg.edges()]
    return Graph.from_edges(len(nodes), edges, [f"{u}-{v}" for u, v in nodes])


def fig6(n: int, delta: int) -> Graph:
    """Rows 0..n-1 and columns n..2n-1; row i is adjacent to columns
    i, i+1, ..., i+delta-1 (mod n)."""
    edges = [(i, n + (i + t) % n) for i in range(n) for t in range(delta)]
    labels = [str(i + 1) for i in range(n)] + [f"{j + 1}'" for j in range(n)]
    return Graph.from_edges(2 * n, edges, labels)


def fig6_for(d: int) -> Graph:
    return fig6(4 * d, 2 * d)


def interval_graph(intervals) -> Graph:
    n = len(intervals)
    edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if max(intervals[i][0], intervals[j][0]) <= min(intervals[i][1], intervals[j][1])
    ]
    return Graph.from_edges(n, edges)


# an interval graph containing claws and forks (so only the interval-type bound gives 2)
INTERVAL_EXAMPLE = [(0, 10), (1, 2), (3, 4), (5, 6), (6, 12), (11, 13), (7, 8), (14, 15), (12, 16)]


@lru_cache(maxsize=None)
def connected_graphs(max_n: int, min_n: int = 1) -> tuple[Graph, ...]:
    """All connected graphs on min_n..max_n vertices up to isomorphism
    (from the graph atlas, so max_n <= 7)."""
    if max_n > 7:
        raise ValueError("the atlas covers at most 7 vertices")
    out = []
    for g in nx.graph_atlas_g():
        n = g.number_of_nodes()
        if min_n <= n <= max_n and (n == 1 or nx.is_connected(g)):
            out.append(from_nx(g))
    return tuple(out)


def _canon_biadj(cols: list[int], a: int) -> tuple:
    best = None
    for perm in permutations(range(a)):
        key = tuple(sorted(sum(1 << perm[i] for i in range(a) if c >> i & 1) for c in cols))
        if best is None or key < best:
            best = key
    return best


@lru_cache(maxsize=None)
def connected_bipartite_graphs(n: int) -> tuple[Graph, ...]:
    """All connected bipartite graphs on exactly n vertices up to
    isomorphism, from bi-adjacency matrices with a <= b rows and columns.
    A connected bipartite graph has a unique bipartition, so shapes never
    collide and only the a == b case needs the transpose."""
    if n == 1:
        return (Graph(1, (0,)),)
    out = []
    for a in range(1, n // 2 + 1):
        b = n - a
        seen = set()
        full_col = (1 << a) - 1
        for code in range(1 << (a * b)):
            cols = [(code >> (a * j)) & full_col for j in range(b)]
            if 0 in cols or any(cols[j] > cols[j + 1] for j in range(b - 1)):
                continue  # every column needs a neighbour; columns sorted w.l.o.g.
            edges = [(i, a + j) for j, c in enumerate(cols) for i in range(a) if c >> i & 1]
            g = Graph.from_edges(n, edges)
            if not is_connected(g):
                continue
            key = _canon_biadj(cols, a)
            if a == b:
                rows = [sum(1 << j for j in range(b) if cols[j] >> i & 1) for i in range(a)]
                key = min(key, _canon_biadj(rows, b))
            if key in seen:
                continue
            seen.add(key)
            out.append(g)
    return tuple(out)


def named_fixtures() -> dict[str, Graph]:
    """Named catalog members (unweighted)."""
    out = {
        "fig1": fixture("fig1").graph,
        "q3": cube(),
        "bw3": bw3(1),
        "lk4": line_graph(nx.complete_graph(4)),
        "lk33": line_graph(nx.complete_bipartite_graph(3, 3)),
        "interval": interval_graph(INTERVAL_EXAMPLE),
    }
    for k in (1, 2, 3):
        out[f"p4k{k}"] = p4k(k)
    for n in range(5, 9):
        out[f"c{n}"] = cycle_graph(n)
    for d in (1, 2):
        out[f"fig6_d{d}"] = fig6_for(d)
    return out


def fig5() -> WeightedGraph:
    return fixture("fig5")
