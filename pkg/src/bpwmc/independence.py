"""Exact independent-set oracle: enumeration, polynomial profile, Gibbs
weights, root checks and log-concavity margins."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import mpmath
import numpy as np

from . import kernels
from .errors import DomainError, NumericError, ResourceError
from .graph import Graph, WeightedGraph, as_graph, as_weighted, bits
from .numbers import as_rational

ENUM_CAP = 20


def _bitrev_key(mask: int, n: int) -> int:
    # larger value <=> smaller lowest elements; negated gives sorted-tuple order
    return int(f"{mask:0{n}b}"[::-1], 2) if n else 0


@lru_cache(maxsize=4096)
def _sorted_masks(g: Graph) -> tuple[int, ...]:
    raw = kernels.independent_masks(g.adj, g.n) if g.n <= 62 else None
    masks = [int(x) for x in raw]
    masks.sort(key=lambda m: (m.bit_count(), -_bitrev_key(m, g.n)))
    return tuple(masks)


def independent_sets(g, cap: int = ENUM_CAP) -> tuple[int, ...]:
    """Every independent set as a bitmask, ordered by size and then
    lexicographically (canonical state order used throughout)."""
    g = as_graph(g)
    if g.n > cap:
        raise ResourceError(f"enumeration cap exceeded: n={g.n} > {cap}")
    return _sorted_masks(g)


def enumerate_independent_sets(g, cap: int = ENUM_CAP) -> list[list[int]]:
    """Independent sets grouped by size: ``out[k]`` lists the k-sets."""
    groups: list[list[int]] = []
    for m in independent_sets(g, cap):
        k = m.bit_count()
        while len(groups) <= k:
            groups.append([])
        groups[k].append(m)
    return groups


def alpha(g) -> int:
    return independent_sets(g)[-1].bit_count()


@dataclass
class PolynomialProfile:
    alpha: int
    counts: list[int]
    weighted_counts: list[int] | None
    lam: Fraction
    scaled: list[Fraction] = field(init=False)
    ratios: list[Fraction] = field(init=False)
    _roots: list | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        base = self.weighted_counts if self.weighted_counts is not None else self.counts
        self.scaled = [c * self.lam**i for i, c in enumerate(base)]
        self.ratios = [Fraction(base[i - 1], base[i]) for i in range(1, self.alpha + 1)]

    @property
    def n(self) -> int:
        return self.counts[1] if len(self.counts) > 1 else 0

    def partition(self, lam=None) -> Fraction:
        """P(lam) (weighted if weights were given); defaults to the profile's lam."""
        if lam is None:
            return sum(self.scaled, Fraction(0))
        lam = as_rational(lam)
        base = self.weighted_counts if self.weighted_counts is not None else self.counts
        return sum((c * lam**i for i, c in enumerate(base)), Fraction(0))

    def at(self, lam) -> "PolynomialProfile":
        return PolynomialProfile(self.alpha, self.counts, self.weighted_counts, as_rational(lam))

    @property
    def roots(self) -> list[dict]:
        if self._roots is None:
            self._roots = polynomial_roots(self.counts)
        return self._roots

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "counts": self.counts,
            "weighted_counts": self.weighted_counts,
            "lambda": float(self.lam),
            "scaled": [float(x) for x in self.scaled],
            "ratios": [float(x) for x in self.ratios],
            "roots": [{"re": r["re"], "im": r["im"], "residual": r["residual"]} for r in self.roots],
        }


def profile(g, lam=1, cap: int = ENUM_CAP) -> PolynomialProfile:
    """Exact counts ``N_k`` (and ``W_k`` for non-unit weights) at fugacity lam."""
    wg = as_weighted(g)
    masks = independent_sets(wg.graph, cap)
    a = masks[-1].bit_count()
    counts = [0] * (a + 1)
    for m in masks:
        counts[m.bit_count()] += 1
    wc = None
    if not wg.is_unit:
        wc = [0] * (a + 1)
        for m in masks:
            wc[m.bit_count()] += wg.weight_of(m)
    return PolynomialProfile(a, counts, wc, as_rational(lam))


@dataclass
class Gibbs:
    states: tuple[int, ...]
    probs: list[Fraction]

    def as_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])

    def prob(self, mask: int) -> Fraction:
        return self.probs[self.states.index(mask)]


def gibbs(g, lam) -> Gibbs:
    """Hardcore distribution ``pi(I) ∝ w(I) lam^|I|`` in exact rationals."""
    wg = as_weighted(g)
    lam = as_rational(lam)
    if lam < 0:
        raise DomainError("fugacity must be nonnegative")
    states = independent_sets(wg.graph)
    weights = [wg.weight_of(m) * lam ** m.bit_count() for m in states]
    z = sum(weights, Fraction(0))
    return Gibbs(states, [w / z for w in weights])


# ------------------------------------------------------------------ roots


def _poly_trim(p):
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _poly_divmod(a, b):
    """Polynomial long division; coefficients low-to-high."""
    b = _poly_trim(list(b))
    r = [Fraction(c) for c in a]
    if len(r) < len(b):
        return [Fraction(0)], _poly_trim(r)
    q = [Fraction(0)] * (len(r) - len(b) + 1)
    for shift in range(len(r) - len(b), -1, -1):
        c = r[shift + len(b) - 1] / b[-1]
        q[shift] = c
        for i, bc in enumerate(b):
            r[i + shift] -= c * bc
    return q, _poly_trim(r[: len(b) - 1] or [Fraction(0)])


def _poly_gcd(a, b):
    a, b = _poly_trim(list(a)), _poly_trim(list(b))
    while any(b):
        _, r = _poly_divmod(a, b)
        a, b = b, r
    return [c / a[-1] for c in a]


def _deriv(p):
    return [i * c for i, c in enumerate(p)][1:] or [Fraction(0)]


def squarefree_part(coeffs) -> list[Fraction]:
    p = [Fraction(c) for c in coeffs]
    g = _poly_gcd(p, _deriv(p))
    if len(g) == 1:
        return p
    q, _ = _poly_divmod(p, g)
    return _poly_trim(q)


def _eval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _sign_changes(seq):
    signs = [s for s in seq if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def sturm_count(coeffs, lo=None, hi=None) -> int:
    """Number of distinct real roots in (lo, hi]; ``None`` means infinite."""
    p = _poly_trim([Fraction(c) for c in coeffs])
    chain = [p, _deriv(p)]
    while len(chain[-1]) > 1 or chain[-1][0] != 0:
        _, r = _poly_divmod(chain[-2], chain[-1])
        if not any(r):
            break
        chain.append([-c for c in r])

    def at(x, sign_inf):
        if x is None:
            # sign of the leading term at +-infinity
            return [c[-1] * (sign_inf ** (len(c) - 1)) for c in chain]
        return [_eval(c, x) for c in chain]

    return _sign_changes(at(lo, -1)) - _sign_changes(at(hi, 1))


def squarefree_factorization(coeffs) -> list[tuple[list[Fraction], int]]:
    """Yun's algorithm: ``[(a_i, i)]`` with ``p = lead * prod a_i^i``."""
    p = _poly_trim([Fraction(c) for c in coeffs])
    if len(p) == 1:
        return []
    dp = _deriv(p)
    b = _poly_gcd(p, dp)
    c, _ = _poly_divmod(p, b)
    d, _ = _poly_divmod(dp, b)
    d = [x - y for x, y in zip(_pad(d, len(c)), _pad(_deriv(c), len(c)))]
    out = []
    i = 1
    while len(_poly_trim(c)) > 1:
        a = _poly_gcd(c, _poly_trim(d))
        if len(a) > 1:
            out.append((a, i))
        c, _ = _poly_divmod(c, a)
        d, _ = _poly_divmod(_poly_trim(d), a)
        d = [x - y for x, y in zip(_pad(d, len(c)), _pad(_deriv(c), len(c)))]
        i += 1
    return out


def _pad(p, k):
    return list(p) + [Fraction(0)] * (k - len(p))


def polynomial_roots(coeffs) -> list[dict]:
    """Numeric roots of ``sum c_k x^k`` with multiplicities and relative
    residuals. Repeated roots are separated exactly first (squarefree
    factorisation), so each companion matrix has simple roots only."""
    coeffs = [int(c) for c in coeffs]
    out = []
    full_hi = [float(c) for c in reversed(coeffs)]
    for factor, mult in squarefree_factorization(coeffs):
        hi_first = [float(c) for c in reversed(factor)]
        for r in np.roots(hi_first):
            scale = sum(abs(c) * abs(r) ** k for k, c in enumerate(reversed(hi_first))) or 1.0
            res = abs(np.polyval(hi_first, r)) / scale
            if not np.isfinite(res) or res > 1e-6:
                raise NumericError(f"root finder residual {res:.3g} at {r}")
            den = sum(abs(c) * abs(r) ** k for k, c in enumerate(coeffs)) or 1.0
            out.append({
                "re": float(r.real),
                "im": float(r.imag),
                "residual": float(abs(np.polyval(full_hi, r)) / den),
                "multiplicity": mult,
            })
    out.sort(key=lambda d: (d["re"], d["im"]))
    return out


@dataclass
class RootCheck:
    passed: bool
    witness: dict | None
    roots: list[dict]
    distinct_real_negative: int
    degree_squarefree: int


def check_real_negative_roots(prof: PolynomialProfile, tol: float = 1e-8) -> RootCheck:
    """All roots of ``sum N_k x^k`` real and negative: exact Sturm count on
    the squarefree part plus a numeric check at relative tolerance ``tol``."""
    if prof.alpha < 1:
        raise DomainError("polynomial is constant (alpha = 0)")
    sf = squarefree_part(prof.counts)
    deg = len(sf) - 1
    neg = sturm_count(sf, None, Fraction(0))
    if _eval(sf, Fraction(0)) == 0:
        neg -= 1  # root at zero is counted in (-inf, 0]
    roots = prof.roots
    witness = None
    for r in roots:
        if abs(r["im"]) > tol * (1 + abs(r["re"])) or r["re"] >= 0:
            witness = r
            break
    passed = witness is None and neg == deg
    if witness is None and not passed:
        witness = {"sturm_negative_roots": neg, "degree": deg}
    return RootCheck(passed, witness, roots, neg, deg)


# ------------------------------------------------------------------ log-concavity


@dataclass
class LogConcavityReport:
    passed: bool
    adjacent: list[dict]
    lemma: list[dict]


def _falling_ratio(m: int, k: int) -> Fraction:
    # (m)_k / m^k
    return Fraction(factorial(m) // factorial(m - k), m**k)


def log_concavity_report(prof: PolynomialProfile) -> LogConcavityReport:
    """Check the binomial-normalised log-concavity consequence for each
    interior index, and the Gaussian-tail bound ``M_{m-k}/M_m <=
    exp(-(k-1)^2/2m) (M_{m-1}/M_m)^k``.

    Margins are RHS - LHS. The first family is exact; the second is checked
    exactly through the intermediate falling-factorial bound and then in
    50-digit arithmetic against the exponential.
    """
    a = prof.alpha
    M = prof.scaled
    if a < 2:
        return LogConcavityReport(True, [], [])
    for i in range(1, a):
        if M[i] == 0:
            raise DomainError(f"degenerate profile: M_{i} = 0")
    adjacent = []
    ok = True
    for i in range(1, a):
        lhs = M[i - 1] / M[i]
        coef = Fraction(i * (a - i), (i + 1) * (a - i + 1))
        rhs = coef * M[i] / M[i + 1]
        good = lhs <= rhs and rhs <= Fraction(i, i + 1) * M[i] / M[i + 1]
        ok &= good
        adjacent.append({"i": i, "lhs": lhs, "rhs": rhs, "margin": rhs - lhs, "pass": good})
    lemma = []
    with mpmath.workdps(50):
        for m in range(1, a + 1):
            r = M[m - 1] / M[m]
            for k in range(1, m + 1):
                lhs = M[m - k] / M[m]
                inter = _falling_ratio(m, k) * r**k
                exact_ok = lhs <= inter
                if k == 1:
                    exp_ok = lhs == r  # the bound is an identity at k = 1
                    margin = mpmath.mpf(0)
                else:
                    rhs = mpmath.exp(mpmath.mpf(-((k - 1) ** 2)) / (2 * m)) * (mpmath.mpf(r.numerator) / r.denominator) ** k
                    margin = rhs - mpmath.mpf(lhs.numerator) / lhs.denominator
                    exp_ok = margin >= 0
                good = exact_ok and bool(exp_ok)
                ok &= good
                lemma.append({"m": m, "k": k, "lhs": lhs, "falling_bound": inter, "margin": float(margin), "pass": good})
    return LogConcavityReport(ok, adjacent, lemma)


def ratios_strictly_increasing(prof: PolynomialProfile) -> bool:
    r = prof.ratios
    return all(x < y for x, y in zip(r, r[1:]))


def binomial_bound_ok(prof: PolynomialProfile) -> bool:
    """``N_0 = 1``, ``N_1 = n`` and ``N_k <= C(n, k)``."""
    n = prof.counts[1] if prof.alpha >= 1 else 0
    return prof.counts[0] == 1 and all(c <= comb(n, k) for k, c in enumerate(prof.counts))
