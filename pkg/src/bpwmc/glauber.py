"""Glauber dynamics for the hardcore model: simulation, exact transition
matrices, spectra, mixing-time bounds and exact conductance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .errors import DomainError, NumericError, ResourceError
from .graph import WeightedGraph, as_weighted, bits
from .independence import gibbs, independent_sets
from .numbers import as_rational
from .rng import as_generator

MATRIX_CAP = 4096
CUT_CAP = 20


@dataclass(frozen=True)
class ChainConfig:
    lam: float = 1.0
    seed: int = 0
    steps: int = 0
    epsilon: float = 0.25

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError("fugacity must be positive")
        if self.steps < 0:
            raise DomainError("steps must be nonnegative")


# ------------------------------------------------------------------ simulation


def step(g, z: int, lam, rng) -> int:
    """One (weighted) Glauber move from independent set ``z``."""
    wg = as_weighted(g)
    if not wg.graph.is_independent(z):
        raise DomainError("current state is not an independent set")
    rng = as_generator(rng)
    out = kernels.run_chain(wg.graph.adj, wg.weights, float(lam), z, [rng.random()], [rng.random()])
    return int(out[0])


def run(g, lam, steps: int, rng, start: int = 0) -> np.ndarray:
    """Trajectory (state after each step) of ``steps`` moves from ``start``."""
    wg = as_weighted(g)
    if not wg.graph.is_independent(start):
        raise DomainError("start state is not an independent set")
    rng = as_generator(rng)
    u_pick = rng.random(steps)
    u_acc = rng.random(steps)
    return kernels.run_chain(wg.graph.adj, wg.weights, float(lam), start, u_pick, u_acc)


def sizes(trajectory) -> np.ndarray:
    traj = np.asarray(trajectory)
    if traj.dtype == object:
        return np.array([int(x).bit_count() for x in traj])
    out = np.zeros(traj.shape, dtype=np.int64)
    t = traj.astype(np.int64).copy()
    while np.any(t):
        out += t & 1
        t >>= 1
    return out


# ------------------------------------------------------------------ exact matrices


@dataclass
class TransitionMatrix:
    states: tuple[int, ...]
    rows: list[dict[int, Fraction]]
    lam: Fraction
    graph: WeightedGraph

    @property
    def index(self) -> dict[int, int]:
        return {s: i for i, s in enumerate(self.states)}

    def dense(self) -> np.ndarray:
        k = len(self.states)
        out = np.zeros((k, k))
        for i, row in enumerate(self.rows):
            for j, p in row.items():
                out[i, j] = float(p)
        return out

    def prob(self, z: int, z2: int) -> Fraction:
        idx = self.index
        return self.rows[idx[z]].get(idx[z2], Fraction(0))


def transition_matrix(g, lam, cap: int = MATRIX_CAP) -> TransitionMatrix:
    """Exact rational transition matrix over all independent sets."""
    wg = as_weighted(g)
    lam = as_rational(lam)
    if lam <= 0:
        raise DomainError("fugacity must be positive")
    h = wg.graph
    states = independent_sets(h)
    if len(states) > cap:
        raise ResourceError(f"{len(states)} states exceed matrix cap {cap}")
    idx = {s: i for i, s in enumerate(states)}
    wp = wg.w_plus
    ins = lam / (1 + lam)
    rows = []
    for z in states:
        row: dict[int, Fraction] = {}
        out = Fraction(0)
        for v in range(h.n):
            bit = 1 << v
            if z & bit:
                p = Fraction(1, wp) / (1 + lam)  # w/w+ times 1/((1+lam) w)
            elif not h.adj[v] & z:
                p = Fraction(wg.weights[v], wp) * ins
            else:
                continue
            row[idx[z ^ bit]] = p
            out += p
        row[idx[z]] = 1 - out
        rows.append(row)
    return TransitionMatrix(states, rows, lam, wg)


def detailed_balance_exact(tm: TransitionMatrix) -> bool:
    """``pi(Z)P(Z,Z') == pi(Z')P(Z',Z)`` for every pair, in rationals; also
    checks each row sums to one."""
    pi = gibbs(tm.graph, tm.lam).probs
    for i, row in enumerate(tm.rows):
        if sum(row.values()) != 1 or any(p < 0 for p in row.values()):
            return False
        for j, p in row.items():
            if pi[i] * p != pi[j] * tm.rows[j].get(i, Fraction(0)):
                return False
    return True


def min_self_loop(tm: TransitionMatrix) -> Fraction:
    return min(row[i] for i, row in enumerate(tm.rows))


# ------------------------------------------------------------------ spectrum


@dataclass
class SpectrumReport:
    beta1: float
    beta_min: float
    beta_max: float
    relaxation: float
    stationary: float
    eigenvalues: np.ndarray
    smallest_eigenvalue_bound_ok: bool

    def to_json(self) -> dict:
        return {
            "beta1": self.beta1,
            "beta_min": self.beta_min,
            "beta_max": self.beta_max,
            "relaxation": self.relaxation,
            "stationary": self.stationary,
            "smallest_eigenvalue_bound_ok": self.smallest_eigenvalue_bound_ok,
        }


@dataclass
class _Eigen:
    values: np.ndarray  # ascending
    vectors: np.ndarray  # orthonormal eigenvectors of the symmetrised matrix
    sqrt_pi: np.ndarray


def _eigen(tm: TransitionMatrix) -> _Eigen:
    pi = gibbs(tm.graph, tm.lam).as_array()
    s = np.sqrt(pi)
    P = tm.dense()
    A = (s[:, None] * P) / s[None, :]
    A = (A + A.T) / 2
    try:
        vals, vecs = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericError(f"eigensolver failed: {exc}") from exc
    return _Eigen(vals, vecs, s)


def spectrum(g, lam, tm: TransitionMatrix | None = None) -> SpectrumReport:
    """Eigenvalues of the reversible chain via its symmetrisation
    ``D^{1/2} P D^{-1/2}`` (D = diag(pi))."""
    tm = tm or transition_matrix(g, lam)
    eg = _eigen(tm)
    vals = eg.values
    if np.any(vals < -1 - 1e-9) or np.any(vals > 1 + 1e-9):
        raise NumericError("eigenvalue outside [-1, 1]")
    top = eg.vectors[:, -1]
    est = top**2 / np.sum(top**2)
    pi = eg.sqrt_pi**2
    resid = float(np.max(np.abs(est - pi)))
    beta1 = float(vals[-2]) if len(vals) > 1 else 0.0
    bmin = float(vals[0]) if len(vals) > 1 else 0.0
    lam_f = float(tm.lam)
    bound_ok = (1 + bmin) > 0 and 1 / (1 + bmin) <= (1 + lam_f) / (2 * min(1.0, lam_f)) * (1 + 1e-9)
    return SpectrumReport(
        beta1=beta1,
        beta_min=bmin,
        beta_max=max(beta1, abs(bmin)),
        relaxation=1 / (1 - beta1),
        stationary=resid,
        eigenvalues=vals,
        smallest_eigenvalue_bound_ok=bool(bound_ok),
    )


def relaxation_bound(n: int, p: int, lam: float, alpha: int) -> float:
    """``2 e alpha n^{p+1} lam^p``: upper bound on the relaxation time."""
    return 2 * math.e * alpha * n ** (p + 1) * lam**p


def mixing_bound(n: int, p: int, lam: float, alpha: int, eps: float) -> float:
    """Mixing-time bound for graphs of bipartite pathwidth at most p:
    ``2e alpha n^{p+1} lam^p (1 + max(lam, 1/lam)) (alpha ln(n lam) + 1 + ln(1/eps))``.
    Requires integer p >= 2 and lam >= e^9 / n."""
    if int(p) != p or p < 2:
        raise DomainError(f"hypothesis p >= 2 (integer) fails: p={p}")
    if n < 1:
        raise DomainError("hypothesis n >= 1 fails")
    if not lam >= math.exp(9) / n:
        raise DomainError(f"hypothesis lambda >= e^9/n fails: {lam} < {math.exp(9) / n:.6g}")
    if not 0 < eps < 1:
        raise DomainError("epsilon must lie in (0, 1)")
    return (
        2 * math.e * alpha * n ** (p + 1) * lam**p * (1 + max(lam, 1 / lam))
        * (alpha * math.log(n * lam) + 1 + math.log(1 / eps))
    )


def tv_distance(mu, nu) -> float:
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if mu.shape != nu.shape:
        raise DomainError("distributions must share a support ordering")
    return 0.5 * float(np.abs(mu - nu).sum())


def tv_exact(mu, nu) -> Fraction:
    return sum((abs(Fraction(a) - Fraction(b)) for a, b in zip(mu, nu)), Fraction(0)) / 2


def distribution_after(tm: TransitionMatrix, t: int, start: int = 0, eig: _Eigen | None = None) -> np.ndarray:
    """Row ``start`` of ``P^t`` via the spectral decomposition."""
    eg = eig or _eigen(tm)
    i = tm.index[start]
    U, s = eg.vectors, eg.sqrt_pi
    coeff = U[i, :] * eg.values**t
    return (U @ coeff) * s / s[i]


def exact_mixing_time(g, lam, eps: float, start: int = 0, tm: TransitionMatrix | None = None, t_max: int = 1 << 40) -> int:
    """Smallest t with ``d_TV(P^t(start, .), pi) <= eps``.

    The distance from a fixed start is non-increasing in t, so doubling
    followed by bisection finds the first crossing.
    """
    tm = tm or transition_matrix(g, lam)
    eg = _eigen(tm)
    pi = eg.sqrt_pi**2

    def dist(t):
        return tv_distance(distribution_after(tm, t, start, eg), pi)

    if dist(0) <= eps:
        return 0
    hi = 1
    while dist(hi) > eps:
        hi *= 2
        if hi > t_max:
            raise NumericError("mixing time exceeds search range")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if dist(mid) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


# ------------------------------------------------------------------ conductance


@dataclass
class Conductance:
    phi: float
    phi_exact: Fraction
    witness: list[int]  # states (independent-set masks) on the small side
    states: tuple[int, ...]


def conductance_exact(g, lam, cap: int = CUT_CAP) -> Conductance:
    """Minimum ergodic-flow ratio ``Q(S, S^c) / pi(S)`` over all state sets
    with ``pi(S) <= 1/2`` (exhaustive over cuts)."""
    tm = transition_matrix(g, lam)
    k = len(tm.states)
    if k > cap:
        raise ResourceError(f"{k} states exceed cut-enumeration cap {cap}")
    pi = gibbs(tm.graph, tm.lam).probs
    flow = np.zeros((k, k))
    for i, row in enumerate(tm.rows):
        for j, p in row.items():
            if i != j:
                flow[i, j] = float(pi[i] * p)
    phi, code = kernels.min_cut_ratio(np.array([float(x) for x in pi]), flow)
    members = [i for i in range(k) if code >> i & 1]
    inside = set(members)
    q = sum((pi[i] * p for i in members for j, p in tm.rows[i].items() if j not in inside), Fraction(0))
    mass = sum((pi[i] for i in members), Fraction(0))
    return Conductance(phi, q / mass, [tm.states[i] for i in members], tm.states)
