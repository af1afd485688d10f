"""Path decompositions: validation, goodness, exact (bipartite) pathwidth,
the lexicographically least good decomposition, and the staircase-based
constructions for monotone bipartite graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from . import kernels
from .errors import BpwError, DomainError, ResourceError
from .graph import Graph, as_graph, bipartition, bits, components_lex, induced_subgraph, set_key, to_mask

PW_CAP = 16
BPW_CAP = 12


@dataclass(frozen=True)
class PathDecomposition:
    bags: tuple[int, ...]

    @property
    def width(self) -> int:
        return max((b.bit_count() for b in self.bags), default=0) - 1

    @property
    def length(self) -> int:
        return len(self.bags)

    @property
    def good(self) -> bool:
        return is_good(self.bags)

    def key(self) -> tuple:
        """Sort key of the decomposition order (fewer bags, then bagwise)."""
        return (len(self.bags), tuple(set_key(b) for b in self.bags))

    def to_json(self, g: Graph | None = None) -> dict:
        name = (lambda v: g.labels[v]) if g is not None else (lambda v: v)
        return {
            "bags": [[name(v) for v in bits(b)] for b in self.bags],
            "width": self.width,
            "length": self.length,
            "good": self.good,
        }


def _bags(d) -> tuple[int, ...]:
    if isinstance(d, PathDecomposition):
        return d.bags
    return tuple(b if isinstance(b, int) else to_mask(b) for b in d)


@dataclass
class ValidationReport:
    valid: bool
    vertices_covered: bool
    edges_covered: bool
    intervals: bool
    violations: list = field(default_factory=list)


def validate(g, decomposition) -> ValidationReport:
    """Check the three path-decomposition conditions: every vertex in a bag,
    every edge inside a bag, and each vertex's bags form an interval."""
    g = as_graph(g)
    bags = _bags(decomposition)
    viol = []
    union = 0
    for b in bags:
        if b >> g.n:
            raise DomainError("bag contains a vertex outside the graph")
        union |= b
    missing = g.full & ~union
    for v in bits(missing):
        viol.append(("vertex", v))
    for u, v in g.edges():
        if not any(b >> u & 1 and b >> v & 1 for b in bags):
            viol.append(("edge", (u, v)))
    interval_ok = True
    for v in range(g.n):
        idx = [i for i, b in enumerate(bags) if b >> v & 1]
        if idx and idx[-1] - idx[0] + 1 != len(idx):
            gap = next(i for i in range(idx[0], idx[-1]) if not bags[i] >> v & 1)
            viol.append(("interval", (v, gap)))
            interval_ok = False
    return ValidationReport(
        valid=not viol,
        vertices_covered=not missing,
        edges_covered=not any(k == "edge" for k, _ in viol),
        intervals=interval_ok,
        violations=viol,
    )


def is_good(bags) -> bool:
    bags = _bags(bags)
    for a, b in zip(bags, bags[1:]):
        if a & b == a or a & b == b:
            return False
    return True


def make_good(decomposition) -> PathDecomposition:
    """Drop bags contained in a neighbouring bag until none is."""
    bags = list(_bags(decomposition))
    changed = True
    while changed:
        changed = False
        for i in range(len(bags) - 1):
            a, b = bags[i], bags[i + 1]
            if a & b == a:
                del bags[i]
                changed = True
                break
            if a & b == b:
                del bags[i + 1]
                changed = True
                break
    return PathDecomposition(tuple(bags))


def decomposition_from_layout(g: Graph, order: list[int]) -> PathDecomposition:
    """Bag i is the boundary of the first i-1 vertices plus the i-th vertex."""
    bags = []
    prefix = 0
    for v in order:
        boundary = 0
        for u in bits(prefix):
            if g.adj[u] & ~prefix & g.full:
                boundary |= 1 << u
        bags.append(boundary | 1 << v)
        prefix |= 1 << v
    return make_good(bags)


def pathwidth_exact(g, cap: int = PW_CAP) -> tuple[int, PathDecomposition]:
    """Exact pathwidth with an optimal (good) decomposition as witness."""
    g = as_graph(g)
    if g.n > cap:
        raise ResourceError(f"pathwidth cap exceeded: n={g.n} > {cap}")
    if g.n == 0:
        return -1, PathDecomposition(())
    p, order = kernels.vertex_separation(g.adj, g.n)
    d = decomposition_from_layout(g, order)
    assert d.width == p and validate(g, d).valid
    return p, d


@lru_cache(maxsize=65536)
def _pw_cached(g: Graph) -> int:
    return pathwidth_exact(g)[0]


def pathwidth(g) -> int:
    return _pw_cached(as_graph(g))


def maximal_bipartite_sets(g: Graph) -> list[int]:
    """Inclusion-maximal vertex sets inducing a bipartite subgraph."""
    bip = {}
    full = g.full
    out = []
    # process by decreasing size so maximality only needs one-vertex checks
    masks = sorted(range(1, full + 1), key=lambda m: -m.bit_count())
    for m in masks:
        ok = bipartition(g, m) is not None
        bip[m] = ok
        if ok and not any(bip.get(m | 1 << v, False) for v in bits(full & ~m)):
            out.append(m)
    return out


def bipartite_pathwidth_exact(g, cap: int = BPW_CAP) -> tuple[int, int]:
    """Maximum pathwidth over induced bipartite subgraphs, with a witness
    vertex set. Pathwidth is monotone, so only maximal sets are scanned."""
    g = as_graph(g)
    if g.n > cap:
        raise ResourceError(f"bipartite pathwidth cap exceeded: n={g.n} > {cap}")
    if g.n == 0:
        return -1, 0
    best, witness = -1, 0
    for m in sorted(maximal_bipartite_sets(g), key=set_key):
        h, _ = induced_subgraph(g, m)
        p = pathwidth(h)
        if p > best:
            best, witness = p, m
    return best, witness


@lru_cache(maxsize=65536)
def _bpw_cached(g: Graph) -> int:
    return bipartite_pathwidth_exact(g)[0]


def bipartite_pathwidth(g) -> int:
    return _bpw_cached(as_graph(g))


# ------------------------------------------------------------- lex-least good


class _Search:
    def __init__(self, h: Graph, cap: int):
        self.h = h
        self.size = cap + 1
        self.full = h.full
        self.dead: set = set()

    def candidates(self, prev: int, seen: int) -> list[int]:
        """Admissible next bags after ``prev`` in the set order."""
        h = self.h
        unseen = self.full & ~seen
        # vertices with a neighbour not seen yet cannot be forgotten
        must = 0
        for u in bits(prev):
            if h.adj[u] & ~seen:
                must |= 1 << u
        optional = bits(prev & ~must)
        fresh = bits(unseen)
        room = self.size - must.bit_count()
        if room < 1:
            return []
        out = []
        # keep-subsets of prev (not all of prev) and nonempty fresh subsets
        opt_masks = [0]
        for v in optional:
            opt_masks += [m | 1 << v for m in opt_masks]
        fresh_masks = [0]
        for v in fresh:
            fresh_masks += [m | 1 << v for m in fresh_masks if m.bit_count() < room]
        for om in opt_masks:
            keep = must | om
            if keep == prev:
                continue  # prev would be contained in the next bag
            left = room - om.bit_count()
            for fm in fresh_masks:
                if fm and fm.bit_count() <= left:
                    out.append(keep | fm)
        out.sort(key=set_key)
        return out

    def first_bags(self) -> list[int]:
        out = []
        vs = list(range(self.h.n))
        # all nonempty subsets of size <= cap+1, in set order
        for k in range(1, min(self.size, self.h.n) + 1):
            for c in combinations(vs, k):
                out.append(to_mask(c))
        return out

    def extend(self, prev: int, seen: int, left: int, acc: list[int]) -> bool:
        if seen == self.full:
            return left == 0
        if left == 0:
            return False
        unseen = (self.full & ~seen).bit_count()
        # connected graph: consecutive bags overlap, so a bag adds <= cap new vertices
        if unseen > left * (self.size - 1) or unseen < left:
            return False
        key = (prev, seen, left)
        if key in self.dead:
            return False
        for b in self.candidates(prev, seen):
            acc.append(b)
            if self.extend(b, seen | b, left - 1, acc):
                return True
            acc.pop()
        self.dead.add(key)
        return False

    def run(self) -> tuple[int, ...]:
        n = self.h.n
        for r in range(1, n + 1):
            for b in self.first_bags():
                if b == self.full:
                    if r == 1:
                        return (b,)
                    continue
                if r == 1:
                    continue
                acc = [b]
                if self.extend(b, b, r - 1, acc):
                    return tuple(acc)
        raise BpwError("no good decomposition within the width cap")


def lex_least_good(h, width_cap: int | None = None) -> PathDecomposition:
    """Least good decomposition of a connected graph among those of width at
    most ``width_cap`` (default: the pathwidth), under the order "fewer bags
    first, then compare bags in order (smaller size first, then the smallest
    element of the symmetric difference decides)"."""
    h = as_graph(h)
    if h.n == 0:
        return PathDecomposition(())
    if len(components_lex(h)) != 1:
        raise DomainError("lex_least_good needs a connected graph")
    if width_cap is None:
        width_cap = pathwidth(h)
    return _lex_least_cached(h, width_cap)


@lru_cache(maxsize=65536)
def _lex_least_cached(h: Graph, cap: int) -> PathDecomposition:
    return PathDecomposition(_Search(h, cap).run())


# ------------------------------------------------------------- monotone graphs


def _orders_for(g: Graph, rows, cols):
    if rows is None or cols is None:
        from .recognizers import is_monotone

        found = is_monotone(g)
        if found is None:
            raise DomainError("graph has no staircase (monotone) ordering")
        rows, cols = found
    return list(rows), list(cols)


def monotone_window_decomposition(g, rows=None, cols=None, d: int | None = None) -> PathDecomposition:
    """Slide a d x d window (d = psi) over the staircase bi-adjacency matrix
    from the top-left to the bottom-right corner. The window moves right
    when the entry just right of its top row is 1, down when the entry just
    below its left column is 1, and right when free to choose."""
    g = as_graph(g)
    if g.m == 0:
        raise DomainError("graph has no edge")
    if len(components_lex(g)) != 1:
        raise DomainError("graph must be connected")
    rows, cols = _orders_for(g, rows, cols)
    if d is None:
        from .recognizers import psi

        d = psi(g)
    n, m = len(rows), len(cols)
    if d > min(n, m):
        raise DomainError("window larger than a side")

    def one(i, j):
        return g.has_edge(rows[i], cols[j])

    def bag(l, r):
        return to_mask(rows[l : l + d]) | to_mask(cols[r : r + d])

    l = r = 0
    bags = [bag(l, r)]
    while l + d < n or r + d < m:
        right = r + d < m and one(l, r + d)
        down = l + d < n and one(l + d, r)
        if right and down:
            raise BpwError(f"both moves forced at window ({l},{r}): K_{{{d + 1},{d + 1}}} inside")
        if right or (not down and r + d < m):
            r += 1
        else:
            l += 1
        bags.append(bag(l, r))
    return PathDecomposition(tuple(bags))


def degree_bound_decomposition(g, rows=None, cols=None) -> PathDecomposition:
    """Closed neighbourhoods of one side, in staircase order; the side with
    the smaller maximum degree is used."""
    g = as_graph(g)
    rows, cols = _orders_for(g, rows, cols)
    dr = max((g.degree(v) for v in rows), default=0)
    dc = max((g.degree(v) for v in cols), default=0)
    side = rows if dr <= dc else cols
    return PathDecomposition(tuple(g.adj[v] | 1 << v for v in side))
