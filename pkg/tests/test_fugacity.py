import math
from fractions import Fraction

import numpy as np
import pytest

from bpwmc import catalog
from bpwmc.errors import DomainError
from bpwmc.fugacity import (
    SUCCESS_LEVEL, XI_PRIME_THRESHOLD, XI_THRESHOLD, ChainEstimator, OracleEstimator, acceptance_run, argmax_sizes,
    bisect, c_interval, doubling_init, expected_doublings, indicator_asymptotic_variance, lambda_window,
    max_size_lambda, p_m_exact, sample_fixed_size, size_distribution, size_distribution_log_concave,
    small_fugacity_sets, step_failure_budget, xi_lower,
)
from bpwmc.glauber import transition_matrix
from bpwmc.independence import gibbs, profile
from bpwmc.rng import rng_for

P4 = catalog.path_graph(4)
LK4 = catalog.named_fixtures()["lk4"]


def test_p4_window():
    prof = profile(P4)
    assert lambda_window(prof, 1) == (Fraction(1, 4), Fraction(4, 3))
    assert lambda_window(prof, 2) == (Fraction(4, 3), math.inf)
    with pytest.raises(DomainError):
        lambda_window(prof, 3)


@pytest.mark.parametrize("name", ["c5", "lk4", "c7", "lk33", "c8"])
def test_window_gives_concentration(name):
    # summing the two Gaussian tails from k = 0 gives P <= M_m (3 + sqrt(2 pi m))
    prof = profile(catalog.named_fixtures()[name])
    for m in range(1, prof.alpha + 1):
        lo, hi = lambda_window(prof, m)
        pts = [lo, (lo + hi) / 2, hi] if hi != math.inf else [lo, 2 * lo, 4 * lo]
        for lam in pts:
            assert p_m_exact(prof, lam, m) >= 1 / (3 + math.sqrt(2 * math.pi * m))
            assert m in argmax_sizes(prof, lam)
        if hi != math.inf:
            assert p_m_exact(prof, (lo + hi) / 2, m) >= 1 / math.sqrt(2 * math.pi * m)


def test_sqrt_2_pi_m_bound_fails_at_window_edge():
    # C7 has N = (1, 7, 14, 7); at lam_2 = 1/2 sizes 1 and 2 tie as the mode
    prof = profile(catalog.cycle_graph(7))
    lam = prof.ratios[1]
    assert lam == Fraction(1, 2) and argmax_sizes(prof, lam) == [1, 2]
    p1 = p_m_exact(prof, lam, 1)
    assert p1 == Fraction(28, 71) and p1 < 1 / math.sqrt(2 * math.pi)


def test_argmax_iff_window():
    prof = profile(LK4)
    for lam in [Fraction(k, 8) for k in range(1, 40)]:
        for m in range(1, prof.alpha + 1):
            lo, hi = lambda_window(prof, m)
            assert (m in argmax_sizes(prof, lam)) == (lo <= lam <= hi)


def test_p_m_examples():
    assert p_m_exact(profile(catalog.path_graph(2)), 1, 1) == Fraction(2, 3)
    prof = profile(P4)
    assert p_m_exact(prof, 0, 0) == 1 and p_m_exact(prof, 0, 1) == 0
    grid = [Fraction(k, 20) for k in range(1, 200)]
    vals = [p_m_exact(prof, lam, 1) for lam in grid]
    top = vals.index(max(vals))
    assert 0 < top < len(vals) - 1
    assert all(a < b for a, b in zip(vals[:top], vals[1:top + 1]))
    assert all(a > b for a, b in zip(vals[top:], vals[top + 1:]))


def test_max_size_choice():
    prof = profile(LK4)
    lam = max_size_lambda(prof)
    M = prof.at(lam).scaled
    assert M[-2] / M[-1] == Fraction(1, 2)
    assert p_m_exact(prof, lam, prof.alpha) > Fraction(1, 2)


@pytest.mark.parametrize("lam", [Fraction(1, 2), 1, 2])
def test_size_distribution_log_concave(lam):
    for name in ("c5", "lk4", "lk33", "c8"):
        prof = profile(catalog.named_fixtures()[name])
        assert size_distribution_log_concave(prof, lam)
        assert sum(size_distribution(prof, lam)) == 1


def test_threshold_algebra():
    lo, hi = c_interval(0.328)
    assert lo == pytest.approx(0.2702, abs=1e-4) and lo > 0.27
    lo, _ = c_interval(0.207)
    assert lo > 0.162
    # the interval endpoints solve c^2 - (2b + 1/81)c + b^2 = 0
    for b in (0.1, 0.328, 1.0):
        for c in c_interval(b):
            assert c * c - (2 * b + 1 / 81) * c + b * b == pytest.approx(0, abs=1e-12)
    assert xi_lower(1 / math.sqrt(2 * math.pi)) >= 0.328
    assert xi_lower(0.27) >= 0.207
    assert step_failure_budget(81 * 81) == pytest.approx(1.0)
    assert (XI_THRESHOLD, XI_PRIME_THRESHOLD, SUCCESS_LEVEL) == (Fraction(41, 125), Fraction(207, 1000),
                                                                 Fraction(39, 250))


def test_doubling_brackets_p4():
    prof = profile(P4)
    dbl = doubling_init(P4, 1, OracleEstimator(P4), lambda_start=Fraction(1, 10))
    lam1 = prof.ratios[0]
    assert dbl.kappa0 < lam1 < dbl.kappa1 and dbl.regime == "bisect"
    assert dbl.doublings == expected_doublings(lam1, Fraction(1, 10))


def test_doubling_default_start_is_small_lambda_regime():
    dbl = doubling_init(P4, 1, OracleEstimator(P4))
    assert dbl.regime == "small_lambda" and dbl.doublings == 0
    assert small_fugacity_sets(P4, 1) == [0, 1, 2, 4, 8]


def test_expected_doublings_formula():
    # ceil(log2(n lam_m / e^9)) indexes lam = 2^i e^9 / n; the search starts
    # one doubling later, at 2 e^9 / n
    n = 50
    start = Fraction(2) * Fraction(math.exp(9)) / n
    for lam_m in (start * 3, start * 17, start * 1000):
        want = math.ceil(math.log2(n * lam_m / Fraction(math.exp(9))))
        assert expected_doublings(lam_m, start) == want - 1


@pytest.mark.parametrize("name", ["c5", "lk4", "c7", "lk33", "p4k1"])
def test_bisect_oracle(name):
    g = catalog.named_fixtures()[name]
    prof = profile(g)
    est = OracleEstimator(g)
    for m in range(1, prof.alpha + 1):
        res = bisect(g, m, est, rng_for(0, "b"), lambda_start=Fraction(1, 2 * g.n))
        if res.regime == "small_lambda":
            continue
        assert res.success and res.steps <= res.max_steps
        assert p_m_exact(prof, res.lam, m) ** 2 * prof.alpha >= SUCCESS_LEVEL**2


def test_bisect_marker_validation():
    with pytest.raises(DomainError):
        bisect(P4, 1, OracleEstimator(P4), kappa0=2, kappa1=1)
    with pytest.raises(DomainError):
        bisect(P4, 5, OracleEstimator(P4))


def test_bisect_reproducible_trace():
    a = bisect(LK4, 2, OracleEstimator(LK4), rng_for(1, "x"), kappa0=1, kappa1=16).to_json()
    b = bisect(LK4, 2, OracleEstimator(LK4), rng_for(1, "x"), kappa0=1, kappa1=16).to_json()
    assert a == b


def test_chain_estimator_sources():
    est = ChainEstimator(LK4, rng_for(4, "c"), max_steps=10**6)
    e = est(2)
    assert e.info["burn_in_source"] == "exact" and e.info["N"] >= 9 * 2
    assert sum(e.xi) == 1


def test_zero_size_sampling():
    g = catalog.cycle_graph(5)
    lam = Fraction(1, 3)
    run = sample_fixed_size(g, 0, lam, 20, rng_for(2, "z"))
    assert run.samples == [0] * 20
    pi0 = gibbs(g, lam).probs[0]
    acc = acceptance_run(g, 0, lam, 20000, rng_for(2, "acc"), burn_in=100)
    _, var = indicator_asymptotic_variance(g, lam, 0)
    assert abs(acc.acceptance - float(pi0)) <= 3 * math.sqrt(var / 20000)


def test_asymptotic_variance_matches_autocovariance_sum():
    g, lam, m = catalog.cycle_graph(5), Fraction(1), 1
    P = transition_matrix(g, lam).dense()
    pi = np.array([float(x) for x in gibbs(g, lam).probs])
    f = np.array([1.0 if s.bit_count() == m else 0.0 for s in transition_matrix(g, lam).states])
    fc = f - pi @ f
    total, v = pi @ (fc * fc), fc.copy()
    for _ in range(5000):
        v = P @ v
        total += 2 * pi @ (fc * v)
    mean, var = indicator_asymptotic_variance(g, lam, m)
    assert mean == pytest.approx(pi @ f) and var == pytest.approx(total, rel=1e-9)


def test_max_size_sampling_acceptance():
    prof = profile(LK4)
    lam = max_size_lambda(prof)
    acc = acceptance_run(LK4, prof.alpha, lam, 10**5, rng_for(5, "top"), burn_in=200)
    _, var = indicator_asymptotic_variance(LK4, lam, prof.alpha)
    assert acc.acceptance > 0.5 - 3 * math.sqrt(var / 10**5)
    assert all(LK4.is_independent(z) and z.bit_count() == prof.alpha for z in acc.samples[:100])
