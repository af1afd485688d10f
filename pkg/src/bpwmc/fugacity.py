"""Sampling independent sets of a prescribed size m.

The hardcore chain at fugacity lam puts mass ``p_i(lam) = N_i lam^i / P(lam)``
on size i. For claw-free graphs m is the most likely size exactly when
``lam_m <= lam <= lam_{m+1}`` with ``lam_i = N_{i-1}/N_i``, and a bisection on
lam driven by size frequencies locates a fugacity where ``p_m`` is not too
small. Frequencies come from a pluggable estimator: the exact distribution
(deterministic, for testing the control flow) or the Glauber chain itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import glauber
from .errors import DomainError, NumericError
from .graph import as_weighted
from .independence import independent_sets, profile as poly_profile
from .numbers import as_rational
from .rng import as_generator

XI_THRESHOLD = Fraction(328, 1000)
XI_PRIME_THRESHOLD = Fraction(207, 1000)
SUCCESS_LEVEL = Fraction(156, 1000)
DEFAULT_Q = 3.0


# ------------------------------------------------------------------ exact theory


def lambda_window(prof, m: int) -> tuple[Fraction, Fraction | float]:
    """``(lam_m, lam_{m+1})``; the upper end is ``inf`` for ``m = alpha``."""
    if not 1 <= m <= prof.alpha:
        raise DomainError(f"m={m} outside 1..{prof.alpha}")
    lo = prof.ratios[m - 1]
    hi = prof.ratios[m] if m < prof.alpha else math.inf
    return lo, hi


def max_size_lambda(prof) -> Fraction:
    """``2 lam_alpha``: there ``M_{alpha-1}/M_alpha = 1/2``."""
    return 2 * prof.ratios[-1]


def p_m_exact(prof, lam, m: int) -> Fraction:
    """``N_m lam^m / P(lam)``; zero for m outside ``0..alpha``."""
    lam = as_rational(lam)
    if not 0 <= m <= prof.alpha:
        return Fraction(0)
    return prof.counts[m] * lam**m / prof.partition(lam)


def size_distribution(prof, lam) -> list[Fraction]:
    lam = as_rational(lam)
    z = prof.partition(lam)
    return [c * lam**i / z for i, c in enumerate(prof.counts)]


def size_distribution_log_concave(prof, lam) -> bool:
    p = size_distribution(prof, lam)
    return all(p[i] ** 2 >= p[i - 1] * p[i + 1] for i in range(1, len(p) - 1))


def argmax_sizes(prof, lam) -> list[int]:
    p = size_distribution(prof, lam)
    top = max(p)
    return [i for i, x in enumerate(p) if x == top]


# ------------------------------------------------------------------ threshold algebra


def c_interval(b: float) -> tuple[float, float]:
    """Range of ``c`` compatible with an observed ``b = xi sqrt(alpha)`` when
    ``|xi - p| <= sqrt(p)/(9 alpha^{1/4})``: roots of
    ``c^2 - (2b + 1/81) c + b^2``."""
    if b < 0:
        raise DomainError("b must be nonnegative")
    mid = b + 1 / 162
    half = math.sqrt(b / 81 + 1 / 162**2)
    return mid - half, mid + half


def xi_lower(c: float) -> float:
    """Smallest ``xi sqrt(alpha)`` consistent with ``p sqrt(alpha) = c``."""
    return c - math.sqrt(c) / 9


def step_failure_budget(alpha: int) -> float:
    """Per-step error probability bound: three events at ``27/sqrt(alpha)``."""
    return 3 * 27 / math.sqrt(alpha)


def _meets(x, threshold: Fraction, alpha: int) -> bool:
    # x >= t / sqrt(alpha)  <=>  x^2 alpha >= t^2 (x >= 0); exact for rationals
    return as_rational(x) ** 2 * alpha >= threshold**2


# ------------------------------------------------------------------ estimators


@dataclass
class Estimate:
    xi: list  # xi[i] for i = 0..alpha
    info: dict = field(default_factory=dict)


class OracleEstimator:
    """Exact size probabilities: ``xi_i = p_i(lam)``."""

    name = "oracle"

    def __init__(self, g):
        self.prof = poly_profile(as_weighted(g).graph)

    def __call__(self, lam) -> Estimate:
        return Estimate(size_distribution(self.prof, lam), {"regime": "oracle"})


class ChainEstimator:
    """Frequencies of each size over N consecutive chain states after a burn-in.

    ``relaxation`` picks R for ``N = ceil(9 alpha R)``: ``"bound"`` uses the
    bipartite-pathwidth bound, ``"exact"`` the spectral gap, ``"auto"`` the
    bound unless it exceeds ``max_steps``. ``burn_in`` is ``"theorem"``
    (mixing bound at eps = 1/n), ``"exact"`` (matrix powers) or ``"auto"``.
    """

    name = "chain"

    def __init__(self, g, rng, p: int | None = None, relaxation: str = "auto",
                 burn_in: str = "auto", max_steps: int = 10**7):
        from .pathdecomp import bipartite_pathwidth

        self.wg = as_weighted(g)
        if not self.wg.is_unit:
            raise DomainError("fixed-size sampling is for unweighted graphs")
        self.g = self.wg.graph
        self.rng = as_generator(rng)
        self.alpha = independent_sets(self.g)[-1].bit_count()
        self.p = max(1, bipartite_pathwidth(self.g)) if p is None else p
        self.relaxation = relaxation
        self.burn_in = burn_in
        self.max_steps = max_steps

    def _relaxation(self, lam: float) -> tuple[float, str]:
        bound = glauber.relaxation_bound(self.g.n, self.p, lam, self.alpha)
        if self.relaxation == "bound" or (self.relaxation == "auto" and 9 * self.alpha * bound <= self.max_steps):
            return bound, "bound"
        return glauber.spectrum(self.g, lam).relaxation, "exact"

    def _burn_in(self, lam: float) -> tuple[int, str]:
        n = self.g.n
        if self.burn_in != "exact":
            try:
                t = glauber.mixing_bound(n, max(2, self.p), lam, self.alpha, 1 / n if n > 1 else 0.5)
                if self.burn_in == "theorem" or t <= self.max_steps:
                    return math.ceil(t), "theorem"
            except DomainError:
                if self.burn_in == "theorem":
                    raise
        return glauber.exact_mixing_time(self.g, lam, 1 / n if n > 1 else 0.5), "exact"

    def __call__(self, lam) -> Estimate:
        lam_f = float(lam)
        r, r_src = self._relaxation(lam_f)
        burn, b_src = self._burn_in(lam_f)
        n_samples = math.ceil(9 * self.alpha * r)
        if burn + n_samples > self.max_steps:
            raise NumericError(f"estimation needs {burn + n_samples} steps (cap {self.max_steps})")
        traj = glauber.run(self.g, lam_f, burn + n_samples, self.rng)
        sz = glauber.sizes(traj[burn:])
        eta = np.bincount(sz, minlength=self.alpha + 1)
        xi = [Fraction(int(e), n_samples) for e in eta]
        return Estimate(xi, {"regime": "chain", "burn_in": burn, "burn_in_source": b_src,
                             "N": n_samples, "relaxation": r, "relaxation_source": r_src})


def make_estimator(g, kind: str, rng=None, **kw):
    if kind == "oracle":
        return OracleEstimator(g)
    if kind == "chain":
        return ChainEstimator(g, rng, **kw)
    raise DomainError(f"unknown estimator {kind!r}")


# ------------------------------------------------------------------ bisection


@dataclass
class BisectionState:
    kappa0: Fraction
    kappa1: Fraction
    kappa_star: Fraction
    m: int
    alpha: int
    q: float
    lam: Fraction | None = None
    N: int | None = None
    xi: list | None = None
    Xi: list[int] = field(default_factory=list)
    Xi_prime: list[int] = field(default_factory=list)
    step: int = 0

    @property
    def max_steps(self) -> int:
        return max(1, math.ceil(math.log2(2 * self.m * self.kappa_star)))


def _probe(lam, m: int, alpha: int, estimator, rng) -> tuple[str, dict]:
    """One estimation at ``lam``; returns the verdict and a trace record.

    Verdicts: ``found`` (m in Xi'), ``left`` (picked k > m), ``right``
    (picked k < m, or Xi empty).
    """
    est = estimator(lam)
    xi = est.xi
    Xi = [i for i in range(1, alpha + 1) if _meets(xi[i], XI_THRESHOLD, alpha)]
    Xi_p = [i for i in range(1, alpha + 1) if _meets(xi[i], XI_PRIME_THRESHOLD, alpha)]
    rec = {"lambda": float(lam), "xi": [float(x) for x in xi], "Xi": Xi, "Xi_prime": Xi_p, **est.info}
    if m in Xi_p:
        verdict, k = "found", None
    elif not Xi:
        verdict, k = "right", None
    else:
        k = Xi[int(rng.integers(len(Xi)))]
        verdict = "left" if k > m else "right"
    rec["k"] = k
    rec["verdict"] = verdict
    return verdict, rec


@dataclass
class DoublingResult:
    kappa0: Fraction
    kappa1: Fraction
    doublings: int
    regime: str  # "bisect" | "small_lambda"
    trace: list[dict]


def default_lambda_start(n: int) -> Fraction:
    return as_rational(2 * math.exp(9) / n)


def _mode(xi) -> int:
    top = max(xi)
    return min(i for i, x in enumerate(xi) if x == top)


def doubling_init(g, m: int, estimator, rng=None, q: float = DEFAULT_Q, lambda_start=None) -> DoublingResult:
    """Double lam from ``lambda_start`` (default ``2e^9/n``) until the probe
    concludes ``lam_m < lam``; the markers are then ``(lam/2, lam)``.

    The conclusion is drawn from the most frequent size s (smallest on
    ties): ``s >= m`` means ``lam >= lam_s >= lam_m``. A signal at the very
    first probe means ``lam_m`` is tiny: regime ``small_lambda``, served by
    :func:`small_fugacity_sets`.
    """
    g = as_weighted(g).graph
    alpha = independent_sets(g)[-1].bit_count()
    if not 1 <= m <= alpha:
        raise DomainError(f"m={m} outside 1..{alpha}")
    lam = as_rational(lambda_start) if lambda_start is not None else default_lambda_start(g.n)
    ceiling = as_rational(float(max(2, g.n)) ** q)
    trace, i = [], 0
    while True:
        est = estimator(lam)
        s = _mode(est.xi)
        trace.append({"doubling": i, "lambda": float(lam), "xi": [float(x) for x in est.xi], "mode": s, **est.info})
        if s >= m:
            return DoublingResult(lam / 2, lam, i, "small_lambda" if i == 0 else "bisect", trace)
        i += 1
        lam *= 2
        if lam > 2 * ceiling:
            raise DomainError(f"no signal below n^q (q={q}) after {i} doublings: amenability bound violated")


def expected_doublings(lam_m, lambda_start) -> int:
    """Doublings needed for ``lambda_start 2^i`` to pass ``lam_m``."""
    r = as_rational(lam_m) / as_rational(lambda_start)
    if r < 1:
        return 0
    i = 0
    while Fraction(2) ** i <= r:
        i += 1
    return i


def small_fugacity_sets(g, k: int) -> list[int]:
    """All independent sets of size at most k, enumerated directly."""
    return [s for s in independent_sets(as_weighted(g).graph) if s.bit_count() <= k]


@dataclass
class BisectionResult:
    lam: Fraction | None
    success: bool
    steps: int
    max_steps: int
    kappa_star: Fraction
    regime: str
    trace: list[dict]
    doubling: DoublingResult | None = None

    def to_json(self) -> dict:
        return {
            "lambda": None if self.lam is None else float(self.lam),
            "success": self.success,
            "steps": self.steps,
            "max_steps": self.max_steps,
            "kappa_star": float(self.kappa_star),
            "regime": self.regime,
            "trace": self.trace,
            "doubling": None if self.doubling is None else {
                "kappa0": float(self.doubling.kappa0), "kappa1": float(self.doubling.kappa1),
                "doublings": self.doubling.doublings, "regime": self.doubling.regime,
                "trace": self.doubling.trace,
            },
        }


def bisect(g, m: int, estimator, rng=None, kappa0=None, kappa1=None, q: float = DEFAULT_Q,
           lambda_start=None) -> BisectionResult:
    """Bisection on lam for sampling size m.

    Without explicit markers the doubling search supplies them. Each step
    probes the midpoint; it stops once m is in Xi' and fails after
    ``ceil(log2(2 m kappa*))`` steps (at least one).
    """
    g = as_weighted(g).graph
    rng = as_generator(rng)
    alpha = independent_sets(g)[-1].bit_count()
    if not 1 <= m <= alpha:
        raise DomainError(f"m={m} outside 1..{alpha}")
    dbl = None
    if kappa0 is None or kappa1 is None:
        dbl = doubling_init(g, m, estimator, rng, q, lambda_start)
        if dbl.regime == "small_lambda":
            return BisectionResult(None, False, 0, 0, dbl.kappa1, "small_lambda", [], dbl)
        kappa0, kappa1 = dbl.kappa0, dbl.kappa1
    st = BisectionState(as_rational(kappa0), as_rational(kappa1), as_rational(kappa1), m, alpha, q)
    if not 0 < st.kappa0 < st.kappa1:
        raise DomainError("markers must satisfy 0 < kappa0 < kappa1")
    trace = []
    while True:
        st.step += 1
        st.lam = (st.kappa0 + st.kappa1) / 2
        verdict, rec = _probe(st.lam, m, alpha, estimator, rng)
        rec["step"] = st.step
        rec["kappa0"], rec["kappa1"] = float(st.kappa0), float(st.kappa1)
        trace.append(rec)
        if verdict == "found":
            return BisectionResult(st.lam, True, st.step, st.max_steps, st.kappa_star, "bisect", trace, dbl)
        if verdict == "left":
            st.kappa1 = st.lam
        else:
            st.kappa0 = st.lam
        if st.step >= st.max_steps:
            return BisectionResult(None, False, st.step, st.max_steps, st.kappa_star, "failed", trace, dbl)


# ------------------------------------------------------------------ sampling


@dataclass
class FixedSizeSample:
    samples: list[int]
    steps: int
    burn_in: int
    accepted: int

    @property
    def acceptance(self) -> float:
        return self.accepted / self.steps if self.steps else 0.0


def acceptance_run(g, m: int, lam, steps: int, rng, burn_in: int = 0) -> FixedSizeSample:
    """Run ``burn_in + steps`` moves from the empty set and keep every
    post-burn-in state of size m."""
    g = as_weighted(g).graph
    traj = glauber.run(g, float(lam), burn_in + steps, as_generator(rng))[burn_in:]
    keep = glauber.sizes(traj) == m
    samples = [int(x) for x in traj[keep]]
    return FixedSizeSample(samples, steps, burn_in, len(samples))


def sample_fixed_size(g, m: int, lam, count: int, rng, burn_in: int | None = None,
                      max_runs: int = 10**6) -> FixedSizeSample:
    """Rejection sampler: independent runs of ``burn_in`` steps from the
    empty set, keeping the final state whenever it has size m.

    ``steps`` in the result counts runs, so ``acceptance`` estimates
    ``p_m(lam)`` up to the burn-in error.
    """
    g = as_weighted(g).graph
    rng = as_generator(rng)
    if burn_in is None:
        burn_in = glauber.exact_mixing_time(g, float(lam), 1 / max(2, g.n))
    samples, runs = [], 0
    while len(samples) < count:
        if runs >= max_runs:
            raise NumericError(f"only {len(samples)} of {count} samples after {runs} runs")
        runs += 1
        z = int(glauber.run(g, float(lam), burn_in, rng)[-1]) if burn_in else 0
        if z.bit_count() == m:
            samples.append(z)
    return FixedSizeSample(samples, runs, burn_in, len(samples))


def indicator_asymptotic_variance(g, lam, m: int) -> tuple[float, float]:
    """``(p_m, sigma^2)`` for the indicator ``[|Z| = m]`` along the chain in
    stationarity, where ``sigma^2 = lim T var(mean of T steps)``. Computed
    from the fundamental matrix ``(I - P + 1 pi^T)^{-1}``."""
    tm = glauber.transition_matrix(g, lam)
    p = tm.dense()
    pi = np.asarray(glauber.gibbs(tm.graph, lam).as_array(), dtype=float)
    f = np.array([1.0 if s.bit_count() == m else 0.0 for s in tm.states])
    mean = float(pi @ f)
    fc = f - mean
    z = np.linalg.solve(np.eye(len(pi)) - p + np.outer(np.ones(len(pi)), pi), fc)
    var = float(2 * pi @ (fc * z) - pi @ (fc * fc))
    return mean, var
