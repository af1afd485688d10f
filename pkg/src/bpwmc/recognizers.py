"""Forbidden-pattern detection, graph-class recognition and class-based
upper bounds on bipartite pathwidth."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import networkx as nx
from networkx.algorithms import isomorphism

from .errors import DomainError
from .graph import Graph, as_graph, bipartition, bits, components_lex, induced_subgraph, to_mask

# Fixed pattern graphs. Vertex 0 is the highest-degree vertex where it matters.
PATTERNS: dict[str, Graph] = {
    "claw": Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)], ["c", "x", "y", "z"]),
    # claw with a pendant hanging off one leaf
    "fork": Graph.from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 4)], ["c", "x", "y", "z", "w"]),
    # 4-cycle a2 a4 b4 b2 with pendants on a2, a4 and b2
    "armchair": Graph.from_edges(
        7,
        [(0, 1), (1, 2), (2, 3), (4, 5), (5, 6), (6, 2), (1, 5)],
        ["a0", "a2", "a4", "a7", "b0", "b2", "b4"],
    ),
    # two 4-cycles sharing the edge m2-m0, plus a pendant on m2
    "stirrer": Graph.from_edges(
        7,
        [(0, 1), (1, 2), (2, 3), (3, 4), (4, 1), (1, 5), (5, 6), (6, 2)],
        ["h", "m2", "m0", "l0", "l2", "r2", "r0"],
    ),
    # spider with three legs of length two
    "tripod": Graph.from_edges(
        7,
        [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)],
        ["h", "l1", "l2", "m1", "m2", "r1", "r2"],
    ),
}


def _claw(g: Graph) -> dict | None:
    for c in range(g.n):
        nb = bits(g.adj[c])
        for i, x in enumerate(nb):
            for j in range(i + 1, len(nb)):
                y = nb[j]
                if g.has_edge(x, y):
                    continue
                for z in nb[j + 1 :]:
                    if not g.has_edge(x, z) and not g.has_edge(y, z):
                        return {0: c, 1: x, 2: y, 3: z}
    return None


def detect_pattern(g, pattern) -> dict | None:
    """Induced embedding ``{pattern vertex: graph vertex}`` of a named (or
    given) pattern, or ``None``."""
    g = as_graph(g)
    if isinstance(pattern, str):
        if pattern not in PATTERNS:
            raise DomainError(f"unknown pattern {pattern!r}")
        if pattern == "claw":
            return _claw(g)
        pat = PATTERNS[pattern]
    else:
        pat = pattern
    if pat.n > g.n:
        return None
    gm = isomorphism.GraphMatcher(g.to_networkx(), pat.to_networkx())
    for mapping in gm.subgraph_isomorphisms_iter():  # induced by construction
        return {p: v for v, p in sorted(mapping.items(), key=lambda kv: kv[1])}
    return None


def has_hole(g) -> list[int] | None:
    """An induced cycle of length >= 5 (vertex list) or ``None``."""
    g = as_graph(g)

    def grow(path: list[int], on: int, start: int):
        last = path[-1]
        for v in bits(g.adj[last]):
            if v <= start or on >> v & 1:
                continue
            # v may touch only `last` among interior path vertices (and start when closing)
            inner = on & ~(1 << start) & ~(1 << last)
            if g.adj[v] & inner:
                continue
            if g.has_edge(v, start):
                if len(path) + 1 >= 5:
                    return path + [v]
                continue
            found = grow(path + [v], on | 1 << v, start)
            if found:
                return found
        return None

    for s in range(g.n):
        for v in bits(g.adj[s]):
            if v > s:
                found = grow([s, v], 1 << s | 1 << v, s)
                if found:
                    return found
    return None


def _forced_pairs(g: Graph, rows: list[int], cols: list[int]):
    """Column pairs whose relative order is forced by a fixed row order:
    returns (forced edges j -> j' meaning j before j', contradiction flag)."""
    A = [[g.has_edge(r, c) for c in cols] for r in rows]
    m = len(cols)
    before = [[False] * m for _ in range(m)]
    for a in range(m):
        for b in range(m):
            if a == b:
                continue
            # placing a left of b is illegal if some rows i < i' have
            # A[i][b] = A[i'][a] = 1 with A[i][a] = 0 or A[i'][b] = 0
            bad = False
            for i in range(len(rows)):
                if not A[i][b]:
                    continue
                for k in range(i + 1, len(rows)):
                    if A[k][a] and not (A[i][a] and A[k][b]):
                        bad = True
                        break
                if bad:
                    break
            if bad:
                before[b][a] = True  # b must precede a
    for a in range(m):
        for b in range(a + 1, m):
            if before[a][b] and before[b][a]:
                return before, True
    return before, False


def _topo(before, m) -> list[int] | None:
    indeg = [sum(before[x][y] for x in range(m)) for y in range(m)]
    ready = [y for y in range(m) if indeg[y] == 0]
    out = []
    while ready:
        ready.sort()
        x = ready.pop(0)
        out.append(x)
        for y in range(m):
            if before[x][y]:
                indeg[y] -= 1
                if indeg[y] == 0:
                    ready.append(y)
    return out if len(out) == m else None


def is_staircase(g: Graph, rows: list[int], cols: list[int]) -> bool:
    """No forbidden 2x2 pattern: rows i<i', columns j<j' with A[i][j']=1 and
    A[i'][j]=1 force A[i][j]=1 and A[i'][j']=1."""
    A = [[g.has_edge(r, c) for c in cols] for r in rows]
    for i in range(len(rows)):
        for k in range(i + 1, len(rows)):
            for j in range(len(cols)):
                if not A[k][j]:
                    continue
                for jj in range(j + 1, len(cols)):
                    if A[i][jj] and not (A[i][j] and A[k][jj]):
                        return False
    return True


def is_monotone(g, sides: tuple[int, int] | None = None) -> tuple[list[int], list[int]] | None:
    """Row/column orders making the bi-adjacency matrix a staircase, or
    ``None`` when no such orders exist.

    Exhaustive over row orders (identical rows kept in index order, prefixes
    pruned when the column constraints become cyclic); for a fixed row order
    the column constraints are pairwise, so any topological order works.
    """
    g = as_graph(g)
    if sides is None:
        sides = bipartition(g)
        if sides is None:
            raise DomainError("graph is not bipartite")
    rows, cols = bits(sides[0]), bits(sides[1])
    m = len(cols)

    def search(prefix: list[int], remaining: list[int]):
        before, clash = _forced_pairs(g, prefix, cols)
        if clash or _topo(before, m) is None:
            return None
        if not remaining:
            order = _topo(before, m)
            return prefix, [cols[j] for j in order]
        used_rows = set()
        for r in remaining:
            key = g.adj[r]
            if key in used_rows:
                continue  # an identical row was already tried at this position
            used_rows.add(key)
            rest = [x for x in remaining if x != r]
            found = search(prefix + [r], rest)
            if found:
                return found
        return None

    found = search([], rows)
    if found is None:
        return None
    r, c = found
    assert is_staircase(g, r, c)
    return r, c


def is_monotone_bruteforce(g, sides=None) -> bool:
    """Reference check over all row and column permutations (tiny inputs)."""
    g = as_graph(g)
    sides = sides or bipartition(g)
    rows, cols = bits(sides[0]), bits(sides[1])
    for pr in permutations(rows):
        for pc in permutations(cols):
            if is_staircase(g, list(pr), list(pc)):
                return True
    return False


def psi(g) -> int:
    """Largest d such that K_{d,d} is a (not necessarily induced) subgraph."""
    g = as_graph(g)
    if g.m == 0:
        raise DomainError("psi needs at least one edge")
    best = 1

    def grow(last: int, size: int, common: int):
        nonlocal best
        val = min(size, common.bit_count())
        if val > best:
            best = val
        if common.bit_count() <= best:
            return
        for v in range(last + 1, g.n):
            c = common & g.adj[v]
            if c.bit_count() > best:
                grow(v, size + 1, c)

    for v in range(g.n):
        grow(v, 1, g.adj[v])
    return best


def _max_indep_at_least(g: Graph, within: int, k: int) -> bool:
    def rec(cand: int, need: int) -> bool:
        if need <= 0:
            return True
        if cand.bit_count() < need:
            return False
        v = (cand & -cand).bit_length() - 1
        rest = cand & ~(1 << v)
        return rec(rest & ~g.adj[v], need - 1) or rec(rest, need)

    return rec(within, k)


def induced_biclique_number(g) -> int:
    """Largest d with an induced K_{d,d} (0 for edgeless graphs)."""
    g = as_graph(g)
    best = 0

    def grow(last: int, side: int, size: int, common: int):
        nonlocal best
        if size > best and _max_indep_at_least(g, common, size):
            best = size
        for v in range(last + 1, g.n):
            if side & g.adj[v]:
                continue
            c = common & g.adj[v]
            if c.bit_count() > best:
                grow(v, side | 1 << v, size + 1, c)

    for v in range(g.n):
        if g.adj[v]:
            grow(v, 1 << v, 1, g.adj[v])
    return best


def is_chordal(g) -> bool:
    return nx.is_chordal(as_graph(g).to_networkx())


# ------------------------------------------------------------- fork-free classes

_CUBE = nx.hypercube_graph(3)


def classify_forkfree_bipartite(h) -> tuple[str, dict | None]:
    """Class label of a connected bipartite graph among the fork-free
    families (path, even cycle, BW*_3, cube, biclique minus a matching of at
    most two edges, biclique minus a matching of three edges); otherwise
    ``("contains fork", embedding)``."""
    h = as_graph(h)
    sides = bipartition(h)
    if sides is None or len(components_lex(h)) != 1:
        raise DomainError("needs a connected bipartite graph")
    degs = [h.degree(v) for v in range(h.n)]
    if max(degs, default=0) <= 2:
        return ("path" if h.m == h.n - 1 else "even cycle"), None
    if h.n == 8 and nx.is_isomorphic(h.to_networkx(), _CUBE):
        return "cube", None
    a, b = sides
    if _is_bw3(h, a, b) or _is_bw3(h, b, a):
        return "BW*3", None
    missing = []
    for u in bits(a):
        for v in bits(b & ~h.adj[u]):
            missing.append((u, v))
    ends = [x for e in missing for x in e]
    if len(set(ends)) == len(ends):
        if len(missing) <= 2:
            return "biclique minus matching", None
        # C6 with hubs on both sides, every pair of opposite hubs adjacent;
        # fork-free but absent from the usual list (smallest: Q3 plus an
        # antipodal edge)
        if len(missing) == 3:
            return "biclique minus 3-matching", None
    emb = detect_pattern(h, "fork")
    if emb is not None:
        return "contains fork", emb
    return "unclassified", None


def _is_bw3(h: Graph, t: int, s: int) -> bool:
    if t.bit_count() != 3 or s.bit_count() < 4:
        return False
    rim = [v for v in bits(s) if h.adj[v] != t]
    hubs = [v for v in bits(s) if h.adj[v] == t]
    if len(rim) != 3 or not hubs:
        return False
    pairs = {h.adj[v] for v in rim}
    return len(pairs) == 3 and all(p.bit_count() == 2 and p & ~t == 0 for p in pairs)


# ------------------------------------------------------------- reports & bounds


@dataclass
class ClassReport:
    claw_free: bool
    fork_free: bool
    fast: bool
    chordal: bool
    tripod_free: bool
    bipartite: bool
    monotone: bool | None
    hole_free: bool
    psi: int | None
    delta: int
    Delta: int
    induced_biclique: int
    witnesses: dict = field(default_factory=dict)
    bpw_bound: int | None = None
    bound_source: str | None = None

    def to_json(self, g: Graph | None = None) -> dict:
        def lab(x):
            if g is None or x is None:
                return x
            if isinstance(x, dict):
                return [g.labels[v] for _, v in sorted(x.items())]
            return [g.labels[v] for v in x]

        out = {k: v for k, v in self.__dict__.items() if k != "witnesses"}
        out["witnesses"] = {k: lab(v) for k, v in self.witnesses.items()}
        return out


def class_report(g) -> ClassReport:
    g = as_graph(g)
    wit = {}
    found = {}
    for name in ("claw", "fork", "armchair", "stirrer", "tripod"):
        found[name] = detect_pattern(g, name)
        if found[name] is not None:
            wit[name] = found[name]
    hole = has_hole(g)
    if hole is not None:
        wit["hole"] = hole
    sides = bipartition(g)
    mono = None
    if sides is not None:
        mono = hole is None and is_monotone(g, sides) is not None
    degs = [g.degree(v) for v in range(g.n)] or [0]
    rep = ClassReport(
        claw_free=found["claw"] is None,
        fork_free=found["fork"] is None,
        fast=all(found[k] is None for k in ("armchair", "stirrer", "tripod")),
        chordal=is_chordal(g),
        tripod_free=found["tripod"] is None,
        bipartite=sides is not None,
        monotone=mono,
        hole_free=hole is None,
        psi=psi(g) if g.m else None,
        delta=min(degs),
        Delta=max(degs),
        induced_biclique=induced_biclique_number(g),
        witnesses=wit,
    )
    rep.bpw_bound, rep.bound_source = bpw_upper_bound(g, rep)
    return rep


def bpw_upper_bound(g, report: ClassReport | None = None) -> tuple[int | None, str | None]:
    """Smallest applicable class bound on bipartite pathwidth, with its source.

    claw-free: 2; chordal and tripod-free (e.g. interval graphs): 2;
    fork-free without induced K_{d+1,d+1}: max(4, d+2); fast without induced
    K_{d+1,d+1}: 4d-1. Here d = max(1, induced biclique number).
    """
    if report is None:
        report = class_report(g)
    d = max(1, report.induced_biclique)
    options = []
    if report.claw_free:
        options.append((2, "claw-free"))
    if report.chordal and report.tripod_free:
        options.append((2, "chordal tripod-free"))
    if report.fork_free:
        options.append((max(4, d + 2), "fork-free"))
    if report.fast:
        options.append((4 * d - 1, "fast"))
    if not options:
        return None, None
    return min(options)
