"""Canonical paths between independent sets, their encodings, the decoder
that inverts them, and exact congestion certification.

A path from X to Y processes the components of ``G[X △ Y]`` in order of
their least vertex. Each component is swept bag by bag along its
lexicographically least good path decomposition (width capped at the
component's pathwidth). Alongside the current independent set Z the
construction keeps an encoding W (an independent set) and a small set R of
remembered vertices, split into R+ (still to be inserted) and R- (deleted
but not yet written to W). Throughout, ``(Z △ W) ∪ R = X △ Y`` with the
union disjoint, and ``Z ∩ W = X ∩ Y``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import NamedTuple

from .errors import CertificationError, DecodeError, DomainError, ResourceError
from .glauber import spectrum, transition_matrix
from .graph import Graph, as_graph, as_weighted, bipartition, bits, components_lex, induced_subgraph
from .independence import alpha as alpha_of
from .independence import gibbs, independent_sets
from .numbers import E_LOWER, as_rational
from .pathdecomp import lex_least_good, pathwidth

CONGESTION_CAP = 512


class Step(NamedTuple):
    z: int  # state before the move
    z_next: int
    vertex: int
    insert: bool
    w: int  # encoding before the move
    r_plus: int
    r_minus: int
    component: int  # index a of the component being processed
    bag_index: int  # index i (0-based) of the bag being processed
    bag: int
    next_bag: int

    @property
    def r(self) -> int:
        return self.r_plus | self.r_minus


@dataclass
class CanonicalPath:
    x: int
    y: int
    steps: list[Step]
    components: list[int]
    decompositions: list[tuple[int, ...]]  # bags as masks of the host graph
    final_w: int
    trace: list[tuple] | None = None

    def __len__(self):
        return len(self.steps)

    @property
    def states(self) -> list[int]:
        if not self.steps:
            return [self.x]
        return [s.z for s in self.steps] + [self.steps[-1].z_next]


def component_decomposition(g: Graph, comp: int) -> tuple[int, ...]:
    """Lex-least good decomposition of ``G[comp]`` of minimum width, as host
    masks."""
    h, old = induced_subgraph(g, comp)
    d = lex_least_good(h, pathwidth(h))
    out = []
    for b in d.bags:
        m = 0
        for v in bits(b):
            m |= 1 << old[v]
        out.append(m)
    return tuple(out)


def build_path(g, x, y, decompositions: dict[int, list] | None = None, trace: bool = False) -> CanonicalPath:
    """Canonical path from X to Y.

    ``decompositions`` optionally maps a component mask to the bag sequence
    to use for it (host vertex masks or label lists) instead of the
    lex-least one.
    """
    g = as_graph(g)
    x = x if isinstance(x, int) else g.mask_of(x)
    y = y if isinstance(y, int) else g.mask_of(y)
    if not g.is_independent(x) or not g.is_independent(y):
        raise DomainError("endpoints must be independent sets")
    z, w, rp, rm = x, y, 0, 0
    steps: list[Step] = []
    events: list[tuple] | None = [] if trace else None
    comps = components_lex(g, x ^ y)
    decs = []
    for a, comp in enumerate(comps):
        if decompositions and comp in decompositions:
            bags = tuple(b if isinstance(b, int) else g.mask_of(b) for b in decompositions[comp])
        else:
            bags = component_decomposition(g, comp)
        decs.append(bags)
        r = len(bags)
        for i, bag in enumerate(bags):
            nxt = bags[i + 1] if i + 1 < r else 0
            shared = bag & nxt
            # preprocessing: encoded vertices of the overlap are remembered
            rp |= shared & w
            w &= ~shared
            if events is not None:
                events.append(("pre", a, i, z, w, rp, rm))
            to_insert = bag & (w | rp) & ~nxt
            for u in bits(bag & z):
                steps.append(Step(z, z & ~(1 << u), u, False, w, rp, rm, a, i, bag, nxt))
                z &= ~(1 << u)
                if nxt >> u & 1:
                    rm |= 1 << u
                else:
                    w |= 1 << u
                if events is not None:
                    events.append(("step", a, i, z, w, rp, rm))
            for u in bits(to_insert):
                steps.append(Step(z, z | 1 << u, u, True, w, rp, rm, a, i, bag, nxt))
                z |= 1 << u
                if w >> u & 1:
                    w &= ~(1 << u)
                else:
                    rp &= ~(1 << u)
                if events is not None:
                    events.append(("step", a, i, z, w, rp, rm))
            # postprocessing: deleted vertices leaving the window go to W
            w |= rm & ~nxt
            rm &= nxt
            if events is not None:
                events.append(("post", a, i, z, w, rp, rm))
        if (z ^ y) & comp or (w ^ x) & comp or rp or rm:
            raise CertificationError(f"component {a} not fully processed")
    if z != y or w != x:
        raise CertificationError("path did not end at (Y, X)")
    return CanonicalPath(x, y, steps, comps, decs, w, events)


def encoding_independent_at_boundaries(g, path: CanonicalPath) -> bool:
    """W is independent after every bag's postprocessing (needs a traced path).

    Mid-bag it need not be: a deleted vertex that leaves the window is
    written to W while a neighbour awaiting insertion is still there.
    """
    g = as_graph(g)
    return all(g.is_independent(ev[4]) for ev in path.trace if ev[0] in ("pre", "post"))


# ------------------------------------------------------------------ decoding


def decode(g, z: int, z_next: int, w: int, r: int, validate: bool = True) -> tuple[int, int]:
    """Recover the unique (X, Y) whose canonical path makes the move
    ``z -> z_next`` with encoding ``w`` and remembered set ``r``.

    Outside the moved vertex's component the encoding equations fix X and Y
    directly (components before it are finished, those after untouched);
    inside it, the bipartite 2-colouring is pinned down by knowing whether
    the moved vertex belongs to X (a deletion) or Y (an insertion). With
    ``validate`` the path for the answer is rebuilt to confirm the tuple.
    """
    g = as_graph(g)
    diff = z ^ z_next
    if diff.bit_count() != 1:
        raise DecodeError("transition must change exactly one vertex")
    u = diff.bit_length() - 1
    deletion = bool(z >> u & 1)
    if (z ^ w) & r:
        raise DecodeError("remembered set meets Z △ W")
    sym = (z ^ w) | r
    common = z & w
    if not sym >> u & 1:
        raise DecodeError("moved vertex lies outside X △ Y")
    comps = components_lex(g, sym)
    x = y = common
    a = next(k for k, c in enumerate(comps) if c >> u & 1)
    for k, comp in enumerate(comps):
        if k == a:
            continue
        if comp & r:
            raise DecodeError("remembered vertex outside the active component")
        if k < a:
            x |= w & comp
            y |= z & comp
        else:
            x |= z & comp
            y |= w & comp
    comp = comps[a]
    sides = bipartition(g, comp)
    if sides is None:
        raise DecodeError("component of X △ Y is not bipartite")
    s_u = sides[0] if sides[0] >> u & 1 else sides[1]
    s_o = comp & ~s_u
    if deletion:
        x |= s_u
        y |= s_o
    else:
        x |= s_o
        y |= s_u
    if not g.is_independent(x) or not g.is_independent(y):
        raise DecodeError("reconstruction is not a pair of independent sets")
    if validate:
        path = build_path(g, x, y)
        key = (z, z_next, w, r)
        if not any((s.z, s.z_next, s.w, s.r) == key for s in path.steps):
            raise DecodeError("tuple does not occur on the reconstructed canonical path")
    return x, y


# ------------------------------------------------------------------ certification


@dataclass
class SweepReport:
    pairs: int = 0
    transitions_used: int = 0
    l_max: int = 0
    alpha: int = 0
    illegal_moves: list = field(default_factory=list)
    decode_failures: list = field(default_factory=list)
    collisions: list = field(default_factory=list)
    invariant_failures: list = field(default_factory=list)
    r_bound_failures: list = field(default_factory=list)
    max_r: int = 0
    guess_bound_failures: list = field(default_factory=list)
    # moves whose encoding is not independent (happens between the deletion
    # and insertion phases of a bag; see ``encoding_independent_at_boundaries``)
    dependent_encodings: int = 0

    @property
    def passed(self) -> bool:
        return not (
            self.illegal_moves or self.decode_failures or self.collisions
            or self.invariant_failures or self.r_bound_failures or self.guess_bound_failures
            or self.l_max > 2 * self.alpha
        )


def _r_bound_ok(s: Step, p: int) -> bool:
    r = s.r
    if r & ~s.bag:
        return False
    if r.bit_count() <= p:
        return True
    # exceptional case: inserting while the bag is empty of Z and W
    return (
        s.insert and r.bit_count() <= p + 1 and r == s.bag
        and not (s.z & s.bag) and not (s.w & s.bag)
    )


def sweep(g, p: int | None = None, decode_check: bool = True, validate_decode: bool = False) -> SweepReport:
    """Build the canonical path for every ordered pair of independent sets
    and check legality, the encoding invariants, the remembered-set bound
    (with p = bipartite pathwidth unless given), decoding, and injectivity
    of (W, R) per transition."""
    from .pathdecomp import bipartite_pathwidth

    g = as_graph(g)
    states = independent_sets(g)
    if p is None:
        p = bipartite_pathwidth(g)
    rep = SweepReport(alpha=alpha_of(g))
    seen: dict[tuple, tuple[int, int]] = {}
    per_transition: dict[tuple, int] = defaultdict(int)
    for x in states:
        for y in states:
            if x == y:
                continue
            path = build_path(g, x, y)
            rep.pairs += 1
            rep.l_max = max(rep.l_max, len(path))
            for s in path.steps:
                zn = s.z_next
                if (s.z ^ zn).bit_count() != 1 or not g.is_independent(zn) or not ((x ^ y) >> s.vertex & 1):
                    rep.illegal_moves.append((x, y, s))
                r = s.r
                if (
                    (s.z ^ s.w) & r or (s.z ^ s.w) | r != x ^ y or s.z & s.w != x & y
                    or s.z.bit_count() + s.w.bit_count() + r.bit_count() != x.bit_count() + y.bit_count()
                ):
                    rep.invariant_failures.append((x, y, s))
                if not g.is_independent(s.w):
                    rep.dependent_encodings += 1
                rep.max_r = max(rep.max_r, r.bit_count())
                if not _r_bound_ok(s, p):
                    rep.r_bound_failures.append((x, y, s))
                key = (s.z, zn, s.w, r)
                prev = seen.get(key)
                if prev is not None and prev != (x, y):
                    rep.collisions.append((key, prev, (x, y)))
                seen[key] = (x, y)
                per_transition[(s.z, zn)] += 1
                if decode_check:
                    try:
                        got = decode(g, s.z, zn, s.w, r, validate=validate_decode)
                    except DecodeError as exc:
                        rep.decode_failures.append((x, y, s, str(exc)))
                        continue
                    if got != (x, y):
                        rep.decode_failures.append((x, y, s, got))
    rep.transitions_used = len(per_transition)
    n = g.n
    for (z, zn), count in per_transition.items():
        if count > guess_count(states, z, zn, n, p):
            rep.guess_bound_failures.append(((z, zn), count))
    return rep


def guess_count(states, z: int, z_next: int, n: int, p: int) -> int:
    """Number of candidate (W, R): W any independent set, R of size <= p
    avoiding Z △ W, or R of size <= p+1 containing the inserted vertex."""
    u_bit = z ^ z_next
    inserting = bool(z_next & u_bit)
    total = 0
    for w in states:
        free = n - (z ^ w).bit_count()
        total += sum(comb(free, k) for k in range(p + 1))
        if inserting and not (u_bit & (z ^ w)):
            total += comb(free - 1, p)  # size p+1 sets through u
    return total


# ------------------------------------------------------------------ congestion


@dataclass
class CongestionReport:
    lam: Fraction
    p: int
    rho: Fraction
    l_max: int
    bound: float
    passed: bool
    worst_transition: tuple[int, int] | None
    relaxation: float | None = None
    relaxation_ok: bool | None = None
    loads: dict | None = None

    def to_json(self, g: Graph | None = None) -> dict:
        wt = self.worst_transition
        if g is not None and wt is not None:
            wt = [g.names(wt[0]), g.names(wt[1])]
        return {
            "lambda": float(self.lam),
            "p": self.p,
            "rho": float(self.rho),
            "l_max": self.l_max,
            "bound": self.bound,
            "pass": self.passed,
            "worst_transition": wt,
            "relaxation": self.relaxation,
            "relaxation_ok": self.relaxation_ok,
        }


class PathLoads:
    """Per-transition path loads, stored as polynomials in the fugacity so
    one enumeration of paths serves every lambda."""

    def __init__(self, g, cap: int = CONGESTION_CAP):
        wg = as_weighted(g)
        self.wg = wg
        self.states = independent_sets(wg.graph)
        if len(self.states) > cap:
            raise ResourceError(f"{len(self.states)} states exceed congestion cap {cap}")
        self.loads: dict[tuple[int, int], dict[int, int]] = defaultdict(lambda: defaultdict(int))
        self.l_max = 0
        for x in self.states:
            wx = wg.weight_of(x)
            for y in self.states:
                if x == y:
                    continue
                path = build_path(wg.graph, x, y)
                self.l_max = max(self.l_max, len(path))
                k = x.bit_count() + y.bit_count()
                wxy = wx * wg.weight_of(y)
                for s in path.steps:
                    self.loads[(s.z, s.z_next)][k] += wxy

    def rho(self, lam) -> tuple[Fraction, tuple[int, int] | None]:
        lam = as_rational(lam)
        tm = transition_matrix(self.wg, lam)
        idx = tm.index
        part = sum((self.wg.weight_of(s) * lam ** s.bit_count() for s in self.states), Fraction(0))
        best, arg = Fraction(0), None
        for (z, zn), poly in self.loads.items():
            load = sum((c * lam**k for k, c in poly.items()), Fraction(0))
            flow = self.wg.weight_of(z) * lam ** z.bit_count() * tm.rows[idx[z]][idx[zn]]
            ratio = load / (part * flow)
            if ratio > best:
                best, arg = ratio, (z, zn)
        return best, arg


def congestion_bound(n: int, p: int, lam) -> float:
    lam = float(lam)
    return 2 * 2.718281828459045 * n ** (p + 1) * lam**p * (1 + max(lam, 1 / lam))


def congestion_bound_exact_lower(n: int, p: int, lam) -> Fraction:
    """The congestion bound with e replaced by a rational lower bound, so that
    ``rho <= this`` certifies ``rho <= bound``."""
    lam = as_rational(lam)
    return 2 * E_LOWER * n ** (p + 1) * lam**p * (1 + max(lam, 1 / lam))


def congestion(g, lam, p: int | None = None, loads: PathLoads | None = None, with_spectrum: bool = True) -> CongestionReport:
    """Exact congestion of the canonical paths at fugacity lam, checked
    against ``2e n^{p+1} lam^p (1 + max(lam, 1/lam))`` (p defaults to the
    exact bipartite pathwidth), plus the relaxation-time sandwich
    ``(1 - beta_1)^{-1} <= l_max * rho``."""
    from .pathdecomp import bipartite_pathwidth

    wg = as_weighted(g)
    lam = as_rational(lam)
    if p is None:
        p = bipartite_pathwidth(wg.graph)
    loads = loads or PathLoads(wg)
    rho, arg = loads.rho(lam)
    n = wg.graph.n
    ok = rho <= congestion_bound_exact_lower(n, p, lam)
    rep = CongestionReport(lam, p, rho, loads.l_max, congestion_bound(n, p, lam), bool(ok), arg)
    if with_spectrum:
        spec = spectrum(wg, lam)
        rep.relaxation = spec.relaxation
        rep.relaxation_ok = spec.relaxation <= float(loads.l_max * rho) * (1 + 1e-9) + 1e-9
    return rep


# ------------------------------------------------------------------ |R| bound


@dataclass
class RBoundReport:
    p: int
    passed: bool
    max_r: int
    tight_steps: int  # transitions using the exceptional |R| = p+1 case
    counterexample: dict | None


def verify_R_bound(g, p: int, pairs=None) -> RBoundReport:
    """Check the remembered-set bound on every transition of every canonical
    path (or only the given (X, Y) pairs)."""
    g = as_graph(g)
    if pairs is None:
        states = independent_sets(g)
        pairs = ((x, y) for x in states for y in states if x != y)
    max_r = tight = 0
    for x, y in pairs:
        for s in build_path(g, x, y).steps:
            size = s.r.bit_count()
            max_r = max(max_r, size)
            if size > p:
                tight += 1
            if not _r_bound_ok(s, p):
                dump = {
                    "X": g.names(x), "Y": g.names(y), "Z": g.names(s.z), "W": g.names(s.w),
                    "R+": g.names(s.r_plus), "R-": g.names(s.r_minus), "bag": g.names(s.bag),
                    "vertex": g.labels[s.vertex], "insert": s.insert,
                }
                return RBoundReport(p, False, max_r, tight, dump)
    return RBoundReport(p, True, max_r, tight, None)


def table_rows(g, path: CanonicalPath) -> list[dict]:
    """Table-style rows: for each event, the bag being processed and the
    colour of each bag vertex (Z, W, R+ or R-)."""
    g = as_graph(g)
    if path.trace is None:
        raise DomainError("path was built without trace=True")
    rows = []
    for kind, a, i, z, w, rp, rm in path.trace:
        bag = path.decompositions[a][i]
        colour = {}
        for v in bits(bag):
            colour[g.labels[v]] = "Z" if z >> v & 1 else "W" if w >> v & 1 else "R+" if rp >> v & 1 else "R-" if rm >> v & 1 else "?"
        rows.append({"event": kind, "component": a, "bag": i + 1, "colours": colour})
    return rows
