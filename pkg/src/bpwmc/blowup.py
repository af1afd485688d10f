"""Vertex-weight blow-up: replace v by a clique of size w(v) and each edge by
a complete join. Independent sets of the blow-up project onto independent
sets of the source, with fibres of size w(S)."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .errors import DomainError
from .graph import Graph, WeightedGraph, as_weighted, bits, twins
from .independence import profile


@dataclass(frozen=True)
class BlowupMap:
    source: WeightedGraph
    target: Graph
    clique_of: tuple[tuple[int, ...], ...]
    owner: tuple[int, ...]  # target vertex -> source vertex

    def to_json(self) -> dict:
        src = self.source.graph
        return {
            "n": self.target.n,
            "edges": [[self.target.labels[u], self.target.labels[v]] for u, v in self.target.edges()],
            "clique_of": {src.labels[v]: [self.target.labels[t] for t in c] for v, c in enumerate(self.clique_of)},
        }


def blow_up(g, weights=None) -> BlowupMap:
    """Blow-up with cliques laid out in source order (indices ascending
    within each clique)."""
    wg = as_weighted(g) if weights is None else WeightedGraph(g if isinstance(g, Graph) else g.graph, tuple(weights))
    src = wg.graph
    clique_of, owner, labels = [], [], []
    for v in range(src.n):
        start = len(owner)
        clique_of.append(tuple(range(start, start + wg.weights[v])))
        for i in range(wg.weights[v]):
            owner.append(v)
            labels.append(f"{src.labels[v]}{i + 1}")
    edges = []
    for v, c in enumerate(clique_of):
        edges += [(c[i], c[j]) for i in range(len(c)) for j in range(i + 1, len(c))]
    for u, v in src.edges():
        edges += [(a, b) for a in clique_of[u] for b in clique_of[v]]
    target = Graph.from_edges(len(owner), edges, labels)
    return BlowupMap(wg, target, tuple(clique_of), tuple(owner))


def project(bm: BlowupMap, i: int) -> int:
    """Source set of cliques met by an independent set of the blow-up."""
    if not bm.target.is_independent(i):
        raise DomainError("not an independent set of the blow-up")
    out = 0
    for t in bits(i):
        out |= 1 << bm.owner[t]
    return out


def fibre_sizes(bm: BlowupMap) -> dict[int, int]:
    """Number of blow-up independent sets projecting to each source set."""
    from .independence import independent_sets

    counts: dict[int, int] = defaultdict(int)
    for i in independent_sets(bm.target):
        counts[project(bm, i)] += 1
    return dict(counts)


def verify_equivalence(g, weights=None) -> dict:
    """Exact comparison of ``N_k`` of the blow-up with ``W_k`` of the source."""
    bm = blow_up(g, weights)
    nk = profile(bm.target).counts
    src = profile(bm.source)
    wk = src.weighted_counts if src.weighted_counts is not None else src.counts
    k_max = max(len(nk), len(wk))
    per_k = []
    for k in range(k_max):
        a = nk[k] if k < len(nk) else 0
        b = wk[k] if k < len(wk) else 0
        per_k.append({"k": k, "target": a, "source": b, "pass": a == b})
    return {"pass": all(r["pass"] for r in per_k), "per_k": per_k, "alpha_target": len(nk) - 1, "alpha_source": len(wk) - 1}


@dataclass
class ExpandVerdict:
    pattern: Graph
    true_twins: list[tuple[int, int]]
    expandable: bool
    counterexample: WeightedGraph | None = None


def expandability_check(patterns) -> dict:
    """Per pattern: does it have true twins? A class whose minimal forbidden
    subgraphs all lack true twins is expandable. Otherwise the witness
    deletes one twin and gives the other weight 2, whose blow-up is the
    pattern again."""
    verdicts = []
    for pat in patterns:
        tt, _ = twins(pat)
        if not tt:
            verdicts.append(ExpandVerdict(pat, [], True))
            continue
        u1, u2 = tt[0]
        keep = pat.full & ~(1 << u2)
        from .graph import induced_subgraph

        small, old = induced_subgraph(pat, keep)
        w = tuple(2 if old[i] == u1 else 1 for i in range(small.n))
        ce = WeightedGraph(small, w)
        assert nx.is_isomorphic(blow_up(ce).target.to_networkx(), pat.to_networkx())
        verdicts.append(ExpandVerdict(pat, tt, False, ce))
    return {"expandable": all(v.expandable for v in verdicts), "verdicts": verdicts}


def lumped_transition_matrix(bm: BlowupMap, lam) -> dict[tuple[int, int], Fraction]:
    """Transition matrix of the unweighted chain on the blow-up, lumped by
    projection onto source sets. Raises if the chain is not lumpable (the
    row sums into a block must not depend on the representative)."""
    from .glauber import transition_matrix

    tm = transition_matrix(bm.target, lam)
    blocks: dict[tuple[int, int], Fraction] = {}
    seen_rep: dict[int, dict[int, Fraction]] = {}
    for i, s in enumerate(tm.states):
        src = project(bm, s)
        row: dict[int, Fraction] = defaultdict(Fraction)
        for j, p in tm.rows[i].items():
            row[project(bm, tm.states[j])] += p
        row = {k: v for k, v in row.items() if v}
        if src in seen_rep:
            if seen_rep[src] != row:
                raise DomainError("blow-up chain is not lumpable")
        else:
            seen_rep[src] = row
            for t, p in row.items():
                blocks[(src, t)] = p
    return blocks
