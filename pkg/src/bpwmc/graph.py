"""Graph core: bitmask adjacency, edge-list ingestion, structural primitives.

Vertices are ``0..n-1``; the integer order is the lexicographic order used by
every "least"/"in order" choice elsewhere in the package. Vertex sets are
plain Python ints used as bitmasks (bit ``v`` set iff ``v`` is a member).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DomainError, ParseError


def bits(mask: int) -> list[int]:
    """Members of a bitmask in increasing order."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def set_key(mask: int) -> tuple:
    """Sort key for the vertex-set order: size first, then smallest element of
    the symmetric difference decides (equivalently, sorted-tuple order)."""
    return (mask.bit_count(), tuple(bits(mask)))


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]
    labels: tuple[str, ...] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise DomainError("adjacency length does not match n")
        for v, row in enumerate(self.adj):
            if row >> v & 1:
                raise DomainError(f"self-loop at {v}")
            for u in bits(row):
                if u >= self.n or not self.adj[u] >> v & 1:
                    raise DomainError(f"asymmetric adjacency at {u},{v}")
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.n)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels=None) -> "Graph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise DomainError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"edge {u}-{v} outside 0..{n - 1}")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj), tuple(labels) if labels is not None else None)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in bits(self.adj[u] >> (u + 1) << (u + 1))]

    @property
    def m(self) -> int:
        return sum(r.bit_count() for r in self.adj) // 2

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return bits(self.adj[v])

    def nbhd(self, mask: int) -> int:
        """Union of open neighbourhoods of the members of ``mask``."""
        out = 0
        for v in bits(mask):
            out |= self.adj[v]
        return out

    def is_independent(self, mask: int) -> bool:
        for v in bits(mask):
            if self.adj[v] & mask:
                return False
        return True

    def complement(self) -> "Graph":
        full = self.full
        return Graph(self.n, tuple(full & ~row & ~(1 << v) for v, row in enumerate(self.adj)), self.labels)

    def names(self, mask: int) -> list[str]:
        return [self.labels[v] for v in bits(mask)]

    def mask_of(self, names: Iterable) -> int:
        """Mask from label strings or integer indices."""
        index = {lab: i for i, lab in enumerate(self.labels)}
        m = 0
        for x in names:
            if isinstance(x, str):
                if x not in index:
                    raise DomainError(f"unknown vertex label {x!r}")
                m |= 1 << index[x]
            else:
                if not 0 <= x < self.n:
                    raise DomainError(f"vertex {x} outside 0..{self.n - 1}")
                m |= 1 << x
        return m

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g

    def to_text(self, weights: Sequence[int] | None = None) -> str:
        lines = [str(self.n)]
        if weights is not None:
            lines.append("w " + " ".join(map(str, weights)))
        name = str
        if self.labels != tuple(str(i) for i in range(self.n)):
            lines.append("labels " + " ".join(self.labels))
            # labels win over indices when parsing, so write edges by label
            name = self.labels.__getitem__
        lines.extend(f"{name(u)} {name(v)}" for u, v in self.edges())
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class WeightedGraph:
    graph: Graph
    weights: tuple[int, ...]

    def __post_init__(self):
        if len(self.weights) != self.graph.n:
            raise DomainError("one weight per vertex required")
        if any(w < 1 for w in self.weights):
            raise DomainError("weights must be positive integers")

    @classmethod
    def unit(cls, g: Graph) -> "WeightedGraph":
        return cls(g, (1,) * g.n)

    @property
    def w_plus(self) -> int:
        return sum(self.weights)

    @property
    def is_unit(self) -> bool:
        return all(w == 1 for w in self.weights)

    def weight_of(self, mask: int) -> int:
        out = 1
        for v in bits(mask):
            out *= self.weights[v]
        return out


def as_weighted(g) -> WeightedGraph:
    return g if isinstance(g, WeightedGraph) else WeightedGraph.unit(g)


def as_graph(g) -> Graph:
    return g.graph if isinstance(g, WeightedGraph) else g


def load_graph(text: str) -> WeightedGraph:
    """Parse the edge-list format.

    First non-comment line is ``n``; optional ``w w0 .. w_{n-1}`` and
    ``labels l0 .. l_{n-1}`` lines may follow; every other line is ``u v``
    where endpoints are indices or labels. Zero-weight vertices are dropped
    with a warning.
    """
    n = None
    weights = None
    labels = None
    raw_edges = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if n is None:
            if len(tok) != 1:
                raise ParseError(no, "expected vertex count")
            try:
                n = int(tok[0])
            except ValueError:
                raise ParseError(no, f"bad vertex count {tok[0]!r}") from None
            if n < 0:
                raise ParseError(no, "negative vertex count")
            continue
        if tok[0] == "w":
            if weights is not None or raw_edges:
                raise ParseError(no, "weight line must precede edges and appear once")
            if len(tok) != n + 1:
                raise ParseError(no, f"expected {n} weights, got {len(tok) - 1}")
            try:
                weights = [int(t) for t in tok[1:]]
            except ValueError:
                raise ParseError(no, "weights must be integers") from None
            if any(w < 0 for w in weights):
                raise ParseError(no, "negative weight")
            continue
        if tok[0] == "labels":
            if labels is not None or raw_edges:
                raise ParseError(no, "labels line must precede edges and appear once")
            if len(tok) != n + 1 or len(set(tok[1:])) != n:
                raise ParseError(no, f"expected {n} distinct labels")
            labels = tok[1:]
            continue
        if len(tok) != 2:
            raise ParseError(no, f"malformed edge line {line!r}")
        raw_edges.append((no, tok[0], tok[1]))
    if n is None:
        raise ParseError(0, "empty document")

    index = {lab: i for i, lab in enumerate(labels)} if labels else {}

    def resolve(no, t):
        if t in index:
            return index[t]
        try:
            v = int(t)
        except ValueError:
            raise ParseError(no, f"unknown vertex {t!r}") from None
        if not 0 <= v < n:
            raise ParseError(no, f"vertex {v} outside 0..{n - 1}")
        return v

    seen = set()
    edges = []
    for no, a, b in raw_edges:
        u, v = resolve(no, a), resolve(no, b)
        if u == v:
            raise ParseError(no, f"self-loop at {a}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(no, f"duplicate edge {a} {b}")
        seen.add(key)
        edges.append(key)

    g = Graph.from_edges(n, edges, labels)
    if weights is None:
        return WeightedGraph.unit(g)
    zero = [v for v in range(n) if weights[v] == 0]
    if zero:
        warnings.warn(f"removing zero-weight vertices {[g.labels[v] for v in zero]}", stacklevel=2)
        keep = g.full & ~to_mask(zero)
        g, _ = induced_subgraph(g, keep)
        weights = [weights[v] for v in range(n) if v not in zero]
    return WeightedGraph(g, tuple(weights))


def load_graph_file(path) -> WeightedGraph:
    with open(path, encoding="utf-8") as fh:
        return load_graph(fh.read())


def induced_subgraph(g: Graph, s) -> tuple[Graph, list[int]]:
    """``G[S]`` relabelled ``0..|S|-1`` in the order of ``S``; also returns the
    map new index -> old vertex."""
    mask = s if isinstance(s, int) else g.mask_of(s)
    if mask >> g.n:
        raise DomainError("vertex set not contained in the host graph")
    old = bits(mask)
    pos = {v: i for i, v in enumerate(old)}
    adj = tuple(sum(1 << pos[u] for u in bits(g.adj[v] & mask)) for v in old)
    return Graph(len(old), adj, tuple(g.labels[v] for v in old)), old


def components_lex(g: Graph, within: int | None = None) -> list[int]:
    """Connected components (of ``G[within]`` if given) as masks, ordered by
    smallest member."""
    rest = g.full if within is None else within
    out = []
    while rest:
        seed = rest & -rest
        comp = seed
        frontier = seed
        while frontier:
            grow = g.nbhd(frontier) & rest & ~comp
            comp |= grow
            frontier = grow
        out.append(comp)
        rest &= ~comp
    return out


def bipartition(g: Graph, within: int | None = None) -> tuple[int, int] | None:
    """Two-colouring with the least vertex of each component on side A, or
    ``None`` for a non-bipartite graph."""
    a = b = 0
    for comp in components_lex(g, within):
        side_a = comp & -comp
        side_b = 0
        frontier, into_b = side_a, True
        while frontier:
            nxt = g.nbhd(frontier) & comp
            if into_b:
                if nxt & side_a:
                    return None
                nxt &= ~side_b
                side_b |= nxt
            else:
                if nxt & side_b:
                    return None
                nxt &= ~side_a
                side_a |= nxt
            frontier, into_b = nxt, not into_b
        a |= side_a
        b |= side_b
    return a, b


def is_connected(g: Graph) -> bool:
    return g.n > 0 and len(components_lex(g)) == 1


def twins(g: Graph) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """(true twin pairs ``N[u]=N[v]``, false twin pairs ``N(u)=N(v)``)."""
    true_pairs, false_pairs = [], []
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if g.adj[u] | 1 << u == g.adj[v] | 1 << v:
                true_pairs.append((u, v))
            if g.adj[u] == g.adj[v]:
                false_pairs.append((u, v))
    return true_pairs, false_pairs


def disjoint_union(*graphs: Graph) -> Graph:
    edges, off = [], 0
    for h in graphs:
        edges.extend((u + off, v + off) for u, v in h.edges())
        off += h.n
    return Graph.from_edges(off, edges)
