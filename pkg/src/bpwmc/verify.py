"""Self-check suites. Each suite runs one family of exact checks over a
graph catalog and returns a :class:`SuiteResult`; the CLI ``verify``
command and the acceptance tests drive them."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from . import catalog
from .blowup import verify_equivalence
from .canonical import PathLoads, build_path, congestion, sweep, table_rows, verify_R_bound
from .errors import DomainError
from .fugacity import (
    SUCCESS_LEVEL, ChainEstimator, OracleEstimator, acceptance_run, bisect, indicator_asymptotic_variance,
    max_size_lambda, p_m_exact, size_distribution_log_concave,
)
from .glauber import conductance_exact, detailed_balance_exact, exact_mixing_time, mixing_bound, spectrum, transition_matrix
from .graph import Graph, WeightedGraph, bipartition, is_connected
from .independence import (
    binomial_bound_ok, check_real_negative_roots, gibbs, log_concavity_report, profile, ratios_strictly_increasing,
)
from .pathdecomp import (
    BPW_CAP, bipartite_pathwidth_exact, monotone_window_decomposition, pathwidth, validate,
)
from .recognizers import class_report, classify_forkfree_bipartite, detect_pattern, is_monotone
from .rng import rng_for

LAMBDAS = (Fraction(1, 2), Fraction(1), Fraction(2))


@dataclass
class SuiteResult:
    name: str
    passed: bool = True
    checked: int = 0
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def fail(self, msg) -> None:
        self.passed = False
        if len(self.failures) < 20:
            self.failures.append(msg)

    def to_json(self) -> dict:
        return {"suite": self.name, "pass": self.passed, "checked": self.checked,
                "failures": [str(f) for f in self.failures], "details": self.details,
                "seconds": round(self.seconds, 3)}


def _timed(fn):
    def wrapper(*a, **kw):
        t0 = time.perf_counter()
        res = fn(*a, **kw)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def graph_catalog(max_n: int, named: bool = True) -> list[tuple[str, Graph]]:
    """Connected graphs on up to ``min(max_n, 7)`` vertices plus the named
    fixtures with at most ``max_n`` vertices."""
    out = [(f"atlas{i}", g) for i, g in enumerate(catalog.connected_graphs(min(max_n, 7)))]
    if named:
        out += [(k, g) for k, g in catalog.named_fixtures().items() if g.n <= max_n]
    return out


def claw_free_catalog(max_n: int) -> list[tuple[str, Graph]]:
    """Claw-free members of the catalog, plus line graphs of connected graphs
    on at most ``max_n`` edges (claw-free by construction) to reach sizes
    beyond the atlas."""
    out = [(k, g) for k, g in graph_catalog(max_n) if detect_pattern(g, "claw") is None]
    # WL hashes can collide, so buckets are confirmed by an isomorphism test
    buckets: dict[str, list] = {}

    def fresh(g: Graph) -> bool:
        ng = g.to_networkx()
        bucket = buckets.setdefault(nx.weisfeiler_lehman_graph_hash(ng), [])
        if any(nx.is_isomorphic(ng, other) for other in bucket):
            return False
        bucket.append(ng)
        return True

    for _, g in out:
        fresh(g)
    for i, h in enumerate(catalog.connected_graphs(7)):
        if not 8 <= h.m <= max_n:
            continue
        lg = catalog.line_graph(h.to_networkx())
        if not fresh(lg):
            continue
        out.append((f"line{i}", lg))
    return out


# ------------------------------------------------------------------ 1


def stationary_vector(tm) -> np.ndarray:
    """Solve ``pi P = pi`` with ``sum(pi) = 1`` directly from the matrix."""
    p = tm.dense()
    k = p.shape[0]
    a = p.T - np.eye(k)
    a[-1, :] = 1.0
    b = np.zeros(k)
    b[-1] = 1.0
    return np.linalg.solve(a, b)


@_timed
def suite_stationarity(max_n: int = 6, lams=LAMBDAS) -> SuiteResult:
    res = SuiteResult("stationarity")
    worst = 0.0
    for name, g in graph_catalog(max_n):
        for lam in lams:
            tm = transition_matrix(g, lam)
            res.checked += 1
            if not detailed_balance_exact(tm):
                res.fail((name, float(lam), "detailed balance"))
            err = float(np.max(np.abs(stationary_vector(tm) - gibbs(g, lam).as_array())))
            worst = max(worst, err)
            if err > 1e-10:
                res.fail((name, float(lam), "stationary", err))
    res.details["max_stationary_error"] = worst
    return res


# ------------------------------------------------------------------ 2

# Expected event colours for the worked example on fig1 with the drawn bags:
# Z = current set, W = encoding, R+ / R- = remembered.
FIG1_BAGS = ["abdg", "acdg", "cdge", "defg", "dfgj", "fghj", "ghij"]
FIG1_X, FIG1_Y = "adehi", "bcfgj"
FIG1_TABLE = [
    (1, "pre", dict(d="Z", b="W", a="Z", g="R+")),
    (1, "step", dict(d="Z", b="W", a="R-", g="R+")),
    (1, "step", dict(d="R-", b="W", a="R-", g="R+")),
    (1, "step", dict(d="R-", b="Z", a="R-", g="R+")),
    (1, "post", dict(d="R-", b="Z", a="R-", g="R+")),
    (2, "pre", dict(d="R-", c="R+", a="R-", g="R+")),
    (2, "post", dict(d="R-", c="R+", a="W", g="R+")),
    (3, "pre", dict(d="R-", c="R+", e="Z", g="R+")),
    (3, "step", dict(d="R-", c="R+", e="R-", g="R+")),
    (3, "step", dict(d="R-", c="Z", e="R-", g="R+")),
    (3, "post", dict(d="R-", c="Z", e="R-", g="R+")),
    (4, "pre", dict(d="R-", f="R+", e="R-", g="R+")),
    (4, "post", dict(d="R-", f="R+", e="W", g="R+")),
    (5, "pre", dict(f="R+", d="R-", j="R+", g="R+")),
    (5, "post", dict(f="R+", d="W", j="R+", g="R+")),
    (6, "pre", dict(f="R+", h="Z", j="R+", g="R+")),
    (6, "step", dict(f="R+", h="R-", j="R+", g="R+")),
    (6, "step", dict(f="Z", h="R-", j="R+", g="R+")),
    (6, "post", dict(f="Z", h="R-", j="R+", g="R+")),
    (7, "pre", dict(h="R-", j="R+", i="Z", g="R+")),
    (7, "step", dict(h="R-", j="R+", i="W", g="R+")),
    (7, "step", dict(h="R-", j="R+", i="W", g="Z")),
    (7, "step", dict(h="R-", j="Z", i="W", g="Z")),
    (7, "post", dict(h="W", j="Z", i="W", g="Z")),
]


def fig1_table_check() -> tuple[bool, list]:
    """Rebuild the worked fig1 path with the drawn bags and compare every
    event with :data:`FIG1_TABLE`."""
    g = catalog.fixture("fig1").graph
    x, y = g.mask_of(list(FIG1_X)), g.mask_of(list(FIG1_Y))
    bags = [g.mask_of(list(b)) for b in FIG1_BAGS]
    path = build_path(g, x, y, {x ^ y: bags}, trace=True)
    got = [(r["bag"], r["event"], r["colours"]) for r in table_rows(g, path)]
    mism = [(i, a, b) for i, (a, b) in enumerate(itertools.zip_longest(got, FIG1_TABLE)) if a != b]
    return len(path) == 10 and not mism, mism


@_timed
def suite_canonical(max_n: int = 7, named: bool = True) -> SuiteResult:
    res = SuiteResult("canonical")
    pairs = 0
    for name, g in graph_catalog(max_n, named):
        rep = sweep(g)
        res.checked += 1
        pairs += rep.pairs
        if not rep.passed:
            res.fail((name, {k: len(getattr(rep, k)) for k in
                             ("illegal_moves", "decode_failures", "collisions", "invariant_failures")},
                      rep.l_max, rep.alpha))
    ok, mism = fig1_table_check()
    if not ok:
        res.fail(("fig1 table", mism[:3]))
    res.details.update(pairs=pairs, fig1_table=ok)
    return res


# ------------------------------------------------------------------ 3


@_timed
def suite_congestion(max_n: int = 7, lams=LAMBDAS, named: bool = True) -> SuiteResult:
    res = SuiteResult("congestion")
    worst = 0.0
    for name, g in graph_catalog(max_n, named):
        p = max(0, bipartite_pathwidth_exact(g)[0])
        loads = PathLoads(g)
        for lam in lams:
            rep = congestion(g, lam, p=p, loads=loads)
            res.checked += 1
            worst = max(worst, float(rep.rho) / rep.bound)
            if not rep.passed:
                res.fail((name, float(lam), "rho", float(rep.rho), rep.bound))
            if not rep.relaxation_ok:
                res.fail((name, float(lam), "relaxation", rep.relaxation, rep.l_max * float(rep.rho)))
    res.details["max_rho_over_bound"] = worst
    return res


# ------------------------------------------------------------------ 4


@_timed
def suite_rbound(max_n: int = 7, named: bool = True) -> SuiteResult:
    res = SuiteResult("rbound")
    tight_total = 0
    for name, g in graph_catalog(max_n, named):
        p = bipartite_pathwidth_exact(g)[0]
        rep = verify_R_bound(g, p)
        res.checked += 1
        tight_total += rep.tight_steps
        if not rep.passed:
            res.fail((name, rep.counterexample))
    k = 2
    g = catalog.p4k(k)
    a, b, c, d = (g.mask_of([f"{part}{i}" for i in range(k)]) for part in "ABCD")
    steps = build_path(g, a | c, b | d).steps
    tight = any(s.r == b | c and s.r.bit_count() == 2 * k for s in steps)
    if not tight:
        res.fail("P4(2): no step remembers B u C")
    rep = verify_R_bound(g, bipartite_pathwidth_exact(g)[0])
    if not rep.passed:
        res.fail(("p4k2", rep.counterexample))
    res.details.update(exceptional_steps=tight_total, p4k2_tight=tight)
    return res


# ------------------------------------------------------------------ 5

PATHWIDTH_TABLE = (
    [(f"P{n}", catalog.path_graph(n), 1) for n in range(2, 9)]
    + [(f"C{n}", catalog.cycle_graph(n), 2) for n in range(3, 9)]
    + [(f"K{a},{b}", catalog.complete_bipartite(a, b), min(a, b)) for a in range(1, 5) for b in range(1, 5)]
    + [("K5", catalog.complete_graph(5), 4)]
    + [(f"P4({k})", catalog.p4k(k), 2 * k - 1) for k in (1, 2, 3)]
)


@_timed
def suite_pathwidth() -> SuiteResult:
    res = SuiteResult("pathwidth")
    cases = PATHWIDTH_TABLE + [("fig1", catalog.fixture("fig1").graph, 3)]
    for name, g, want in cases:
        res.checked += 1
        got = pathwidth(g)
        if got != want:
            res.fail((name, got, want))
    return res


# ------------------------------------------------------------------ 6


@_timed
def suite_classes(max_bip_n: int = 8, max_n: int = 7) -> SuiteResult:
    res = SuiteResult("classes")
    agree = 0
    for n in range(1, max_bip_n + 1):
        for h in catalog.connected_bipartite_graphs(n):
            label, _ = classify_forkfree_bipartite(h)
            direct = detect_pattern(h, "fork") is None
            res.checked += 1
            if (label not in ("contains fork", "unclassified")) != direct or label == "unclassified":
                res.fail(("fork", n, h.edges(), label, direct))
            else:
                agree += 1
    delta_checked = window_checked = bound_checked = 0
    for name, g in graph_catalog(max_n) + [(k, g) for k, g in catalog.named_fixtures().items() if g.n > max_n]:
        rep = class_report(g)
        if rep.bipartite and rep.fast and g.m:
            delta_checked += 1
            if rep.delta > 2 * rep.psi:
                res.fail((name, "delta", rep.delta, rep.psi))
        if rep.monotone and g.m and is_connected(g):
            window_checked += 1
            dec = monotone_window_decomposition(g)
            val = validate(g, dec)
            if not val.valid or dec.width > 2 * rep.psi - 1:
                res.fail((name, "window", val.valid, dec.width, rep.psi))
        if rep.bpw_bound is not None and g.n <= BPW_CAP:
            bound_checked += 1
            exact = bipartite_pathwidth_exact(g)[0]
            if rep.bpw_bound < exact:
                res.fail((name, "bpw bound", rep.bpw_bound, exact, rep.bound_source))
    res.details.update(fork_agree=agree, delta_checked=delta_checked,
                       window_checked=window_checked, bound_checked=bound_checked)
    return res


# ------------------------------------------------------------------ 7


def random_weighted(rng, max_n: int = 6, max_w: int = 3) -> WeightedGraph:
    n = int(rng.integers(1, max_n + 1))
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5]
    g = Graph.from_edges(n, edges)
    return WeightedGraph(g, tuple(int(x) for x in rng.integers(1, max_w + 1, size=n)))


@_timed
def suite_blowup(count: int = 200, seed: int = 0) -> SuiteResult:
    res = SuiteResult("blowup")
    rng = rng_for(seed, "blowup")
    for i in range(count):
        wg = random_weighted(rng)
        rep = verify_equivalence(wg.graph, wg.weights)
        res.checked += 1
        if not rep["pass"]:
            res.fail((i, wg.graph.edges(), wg.weights))
    return res


# ------------------------------------------------------------------ 8


@_timed
def suite_clawfree(max_n: int = 9, lams=LAMBDAS) -> SuiteResult:
    res = SuiteResult("clawfree")
    for name, g in claw_free_catalog(max_n):
        res.checked += 1
        prof = profile(g)
        roots = check_real_negative_roots(prof, tol=1e-8)
        if not roots.passed:
            res.fail((name, "roots", roots.witness))
        if not ratios_strictly_increasing(prof):
            res.fail((name, "ratios"))
        for lam in lams:
            p = prof.at(lam)
            lc = log_concavity_report(p)
            if not lc.passed or not binomial_bound_ok(p):
                res.fail((name, float(lam), "log-concavity", [r for r in lc.adjacent + lc.lemma if not r["pass"]][:2]))
            if not size_distribution_log_concave(prof, lam):
                res.fail((name, float(lam), "p_i log-concavity"))
    return res


# ------------------------------------------------------------------ 9


def desk_lambda_start(n: int) -> Fraction:
    """Doubling start below ``lam_1 = 1/n`` so that small graphs exercise
    the doubling phase."""
    return Fraction(1, 2 * n)


@_timed
def suite_sampler_oracle(max_n: int = 7, seed: int = 0) -> SuiteResult:
    res = SuiteResult("sampler-oracle")
    steps_hist: dict[int, int] = {}
    for name, g in claw_free_catalog(max_n):
        est = OracleEstimator(g)
        prof = est.prof
        for m in range(1, prof.alpha + 1):
            lam_m = prof.ratios[m - 1]
            runs = [bisect(g, m, est, rng_for(seed, name, str(m)), lambda_start=desk_lambda_start(g.n))]
            for k1 in (lam_m * Fraction(3, 2), 2 * lam_m * Fraction(63, 64)):
                runs.append(bisect(g, m, est, rng_for(seed, name, str(m), "m"), kappa0=k1 / 2, kappa1=k1))
            # wide brackets force several halvings before m enters Xi'
            for k1 in (16 * lam_m, 100 * lam_m):
                runs.append(bisect(g, m, est, rng_for(seed, name, str(m), "w"), kappa0=lam_m / 2, kappa1=k1))
            for r in runs:
                res.checked += 1
                steps_hist[r.steps] = steps_hist.get(r.steps, 0) + 1
                if r.lam is None or r.steps > r.max_steps:
                    res.fail((name, m, r.regime, r.steps, r.max_steps))
                    continue
                pm = p_m_exact(prof, r.lam, m)
                if pm**2 * prof.alpha < SUCCESS_LEVEL**2:
                    res.fail((name, m, float(r.lam), float(pm)))
            d = runs[0].doubling
            if not d.kappa0 <= lam_m < d.kappa1:
                res.fail((name, m, "markers", float(d.kappa0), float(lam_m), float(d.kappa1)))
    res.details["steps_histogram"] = steps_hist
    return res


# ------------------------------------------------------------------ 10


@_timed
def suite_sampler_chain(seeds=range(1, 11), steps: int = 10**5) -> SuiteResult:
    res = SuiteResult("sampler-chain")
    g = catalog.line_graph(nx.complete_graph(4))
    m = 2
    rows = []
    for seed in seeds:
        r = bisect(g, m, ChainEstimator(g, rng_for(seed, "estimate")), rng_for(seed, "pick"),
                   lambda_start=desk_lambda_start(g.n))
        res.checked += 1
        if r.lam is None:
            res.fail((seed, "bisection failed", r.regime))
            continue
        p, var = indicator_asymptotic_variance(g, r.lam, m)
        burn = exact_mixing_time(g, float(r.lam), 1 / g.n)
        run = acceptance_run(g, m, r.lam, steps, rng_for(seed, "accept"), burn)
        se = math.sqrt(var / steps)
        z = (run.acceptance - p) / se
        rows.append({"seed": seed, "lambda": float(r.lam), "acceptance": run.acceptance, "exact": p, "z": z})
        if abs(z) > 3:
            res.fail((seed, run.acceptance, p, z))
    prof = profile(g)
    lam = max_size_lambda(prof)
    p, var = indicator_asymptotic_variance(g, lam, prof.alpha)
    run = acceptance_run(g, prof.alpha, lam, steps, rng_for(0, "max-size"), exact_mixing_time(g, float(lam), 1 / g.n))
    sigma = math.sqrt(var / steps)
    if not p > 0.5 or not run.acceptance > 0.5 - 3 * sigma:
        res.fail(("max-size", p, run.acceptance, sigma))
    res.details.update(runs=rows, max_size={"lambda": float(lam), "exact": p, "acceptance": run.acceptance, "sigma": sigma})
    return res


# ------------------------------------------------------------------ 11


def theorem_instance(g) -> tuple[int, Fraction]:
    """``(p, lam)`` satisfying the mixing theorem's hypotheses for g:
    ``p = max(2, bpw)`` and ``lam = ceil(e^9/n)``."""
    return max(2, bipartite_pathwidth_exact(g)[0]), Fraction(math.ceil(math.exp(9) / g.n))


@_timed
def suite_mixing(max_n: int = 12, eps: float = 0.25, lams=LAMBDAS) -> SuiteResult:
    res = SuiteResult("mixing")
    applicable = 0
    for name, g in graph_catalog(max_n):
        p_exact = bipartite_pathwidth_exact(g)[0]
        alpha = profile(g).alpha
        instances = [(max(2, p_exact), lam) for lam in lams]
        instances.append(theorem_instance(g))
        for p, lam in instances:
            try:
                bound = mixing_bound(g.n, p, float(lam), alpha, eps)
            except DomainError:
                continue
            applicable += 1
            res.checked += 1
            tau = exact_mixing_time(g, lam, eps)
            if tau > bound:
                res.fail((name, p, float(lam), tau, bound))
    phis = {}
    for d in (2, 3):
        phis[d] = conductance_exact(catalog.complete_bipartite(d, d), 1).phi_exact
    res.checked += 1
    ratio = phis[2] / phis[3]
    if ratio < Fraction(18, 10):
        res.fail(("conductance", float(phis[2]), float(phis[3])))
    res.details.update(applicable=applicable, conductance={d: str(v) for d, v in phis.items()}, ratio=float(ratio))
    return res


SUITES = {
    "stationarity": suite_stationarity,
    "canonical": suite_canonical,
    "congestion": suite_congestion,
    "rbound": suite_rbound,
    "pathwidth": suite_pathwidth,
    "classes": suite_classes,
    "blowup": suite_blowup,
    "clawfree": suite_clawfree,
    "sampler-oracle": suite_sampler_oracle,
    "sampler-chain": suite_sampler_chain,
    "mixing": suite_mixing,
}

# suites whose catalog size is controlled by --max-n
SIZED = {"stationarity", "canonical", "congestion", "rbound", "clawfree", "sampler-oracle", "mixing"}


def run_suite(name: str, max_n: int | None = None) -> SuiteResult:
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    fn = SUITES[name]
    if max_n is not None and name in SIZED:
        return fn(max_n=max_n)
    return fn()
