import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polytree.errors import DegenerateConditioningError, InfiniteMutualInformationError
from polytree.estimators import (CorrelationEstimate, Decision, ci_test, clamp_correlation, cmi_test,
                                 empirical_cmi, empirical_mi, partial_correlation,
                                 partial_correlation_general, sample_covariance,
                                 singleton_partial_correlations)
from polytree.model import GaussianSem, conditional_covariance, sample, sem_to_covariance

from conftest import random_pd, random_polytree_sem, seeds


def logdet(a):
    return np.linalg.slogdet(a)[1]


def cmi_oracle(sigma, y, z, x):
    """Gaussian I(Y;Z|X) from log-determinants."""
    s = lambda idx: sigma[np.ix_(idx, idx)]
    return 0.5 * (logdet(s([x, y])) + logdet(s([x, z])) - logdet(s([x])) - logdet(s([x, y, z])))


def test_sample_covariance_small_cases():
    np.testing.assert_array_equal(sample_covariance([[1.0, 2.0]]), [[1, 2], [2, 4]])
    S = sample_covariance([[0.0, 1.0], [0.0, -3.0]])
    assert S[0].tolist() == [0.0, 0.0] and S[:, 0].tolist() == [0.0, 0.0]
    # 1/n with no centering
    assert sample_covariance([[1.0], [3.0]])[0, 0] == 5.0


def test_partial_correlation_examples():
    chain = GaussianSem.from_edges(3, [(0, 1, 0.5), (1, 2, 0.5)])
    sigma = sem_to_covariance(chain)
    assert partial_correlation(sigma, 0, 2, {1}).value == pytest.approx(0.0, abs=1e-15)
    assert partial_correlation(sigma, 0, 1).value == pytest.approx(0.5 / math.sqrt(1.25), abs=1e-15)
    assert partial_correlation(sigma, 0, 1).value == pytest.approx(0.44721, abs=1e-5)
    for S in [(), (2,), (2, 3)]:
        assert partial_correlation(np.eye(4), 0, 1, S).value == 0.0


def test_partial_correlation_matches_conditional_covariance(rng):
    for _ in range(60):
        d = int(rng.integers(4, 9))
        sigma = sem_to_covariance(random_polytree_sem(d, rng))
        j, k, *rest = rng.permutation(d)
        S = rest[: int(rng.integers(0, min(3, d - 2) + 1))]
        C = conditional_covariance(sigma, (j, k), S)
        oracle = C[0, 1] / math.sqrt(C[0, 0] * C[1, 1])
        assert partial_correlation(sigma, j, k, S).value == pytest.approx(oracle, abs=1e-10)
        assert partial_correlation_general(sigma, j, k, S).value == pytest.approx(oracle, abs=1e-10)


def test_partial_correlation_rejects_bad_arguments():
    with pytest.raises(ValueError):
        partial_correlation(np.eye(3), 0, 0)
    with pytest.raises(ValueError):
        partial_correlation(np.eye(3), 0, 1, {1})


def test_partial_correlation_degenerate_names_node():
    sigma = np.array([[1.0, 1.0, 0.2], [1.0, 1.0, 0.2], [0.2, 0.2, 1.0]])
    with pytest.raises(DegenerateConditioningError) as err:
        partial_correlation(sigma, 0, 2, {1})
    assert err.value.given == frozenset({1})
    assert "node 0" in str(err.value)


def test_clamp():
    assert clamp_correlation(1.0 + 1e-10) == 1.0 - 1e-12
    assert clamp_correlation(-1.0) == -(1.0 - 1e-12)
    assert clamp_correlation(0.3) == 0.3
    with pytest.raises(DegenerateConditioningError):
        clamp_correlation(1.0 + 1e-6)


def test_singleton_tensor_matches_scalar_path(rng):
    sigma = random_pd(6, rng)
    R, P = singleton_partial_correlations(sigma)
    for j in range(6):
        for k in range(6):
            if j == k:
                assert np.isnan(R[j, k])
                continue
            assert R[j, k] == pytest.approx(partial_correlation(sigma, j, k).value, abs=1e-14)
            for l in range(6):
                if l in (j, k):
                    assert np.isnan(P[j, k, l])
                else:
                    assert P[j, k, l] == pytest.approx(partial_correlation(sigma, j, k, {l}).value, abs=1e-12)


@pytest.mark.parametrize("value, cutoff, decision", [
    (0.6, 0.05, Decision.REJECT_INDEPENDENCE),
    (-0.6, 0.05, Decision.REJECT_INDEPENDENCE),
    (0.0, 0.3, Decision.ACCEPT_INDEPENDENCE),
    (0.25, 0.25, Decision.REJECT_INDEPENDENCE),
    (0.2499, 0.25, Decision.ACCEPT_INDEPENDENCE),
])
def test_ci_test(value, cutoff, decision):
    out = ci_test(CorrelationEstimate(value, (0, 1)), cutoff)
    assert out.decision is decision
    assert out.statistic == abs(value)
    assert out.dependent == (decision is Decision.REJECT_INDEPENDENCE)


@pytest.mark.parametrize("cutoff", [0.0, 1.0, -0.1])
def test_ci_test_cutoff_range(cutoff):
    with pytest.raises(ValueError):
        ci_test(0.1, cutoff)


def test_empirical_mi_examples():
    assert empirical_mi(np.eye(2), 0, 1) == 0.0
    sigma = np.array([[1.0, 0.6], [0.6, 1.0]])
    assert empirical_mi(sigma, 0, 1) == pytest.approx(-0.5 * math.log(0.64), abs=1e-15)
    assert empirical_mi(sigma, 0, 1) == pytest.approx(0.22314, abs=1e-5)
    with pytest.raises(InfiniteMutualInformationError):
        empirical_mi(np.array([[1.0, 2.0], [2.0, 1.0]]), 0, 1)


@settings(max_examples=60, deadline=None)
@given(seed=seeds, d=st.integers(2, 6))
def test_mi_regression_form_and_symmetry(seed, d):
    rng = np.random.default_rng(seed)
    sigma = random_pd(d, rng)
    j, k = rng.choice(d, 2, replace=False)
    beta = sigma[j, k] / sigma[j, j]
    resid = sigma[k, k] - beta**2 * sigma[j, j]
    mi = empirical_mi(sigma, j, k)
    assert mi >= 0
    assert mi == pytest.approx(0.5 * math.log1p(beta**2 * sigma[j, j] / resid), abs=1e-12)
    assert mi == empirical_mi(sigma, k, j)


def test_cmi_chain_separator_is_zero():
    sigma = sem_to_covariance(GaussianSem.from_edges(3, [(0, 1, 0.8), (1, 2, -0.6)]))
    assert empirical_cmi(sigma, 0, 2, 1) == pytest.approx(0.0, abs=1e-15)
    value, dependent = cmi_test(sigma, 0, 2, 1, 0.1)
    assert not dependent


def test_cmi_v_structure():
    # y -> x <- z with beta 0.8: marginally independent, dependent given the collider
    sigma = sem_to_covariance(GaussianSem.from_edges(3, [(1, 0, 0.8), (2, 0, 0.8)]))
    assert empirical_mi(sigma, 1, 2) == 0.0
    # var x = 2.28; rho(y,z|x) = -0.64 / 1.64
    rho = -0.64 / 1.64
    assert empirical_cmi(sigma, 1, 2, 0) == pytest.approx(-0.5 * math.log1p(-rho**2), abs=1e-14)
    assert empirical_cmi(sigma, 1, 2, 0) > 0


def test_cmi_detects_population_dependence_of_size_eps():
    eps = 0.1
    rho = math.sqrt(-math.expm1(-2 * eps))  # -1/2 log(1 - rho^2) = eps
    sigma = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, rho], [0.0, rho, 1.0]])
    value, dependent = cmi_test(sigma, 1, 2, 0, eps)
    assert value == pytest.approx(eps, abs=1e-12)
    assert value >= eps / 40 and dependent


@settings(max_examples=100, deadline=None)
@given(seed=seeds)
def test_cmi_matches_determinant_oracle_and_symmetry(seed):
    rng = np.random.default_rng(seed)
    sigma = random_pd(4, rng)
    x, y, z = rng.choice(4, 3, replace=False)
    v = empirical_cmi(sigma, y, z, x)
    assert v >= 0
    assert v == pytest.approx(cmi_oracle(sigma, y, z, x), abs=1e-10)
    assert v == pytest.approx(empirical_cmi(sigma, z, y, x), abs=1e-12)


def test_cmi_chain_rule_on_500_random_matrices(rng):
    worst = 0.0
    for _ in range(500):
        sigma = random_pd(3, rng)
        x, y, z = 0, 1, 2
        lhs = empirical_mi(sigma, x, y) - empirical_mi(sigma, x, z)
        rhs = empirical_cmi(sigma, x, y, z) - empirical_cmi(sigma, x, z, y)
        worst = max(worst, abs(lhs - rhs))
    assert worst <= 1e-10


def test_cmi_non_pd_block():
    with pytest.raises(DegenerateConditioningError):
        empirical_cmi(np.ones((3, 3)), 0, 1, 2)
    with pytest.raises(ValueError):
        cmi_test(np.eye(3), 0, 1, 2, 0.0)


@pytest.mark.slow
def test_cmi_tester_calibrated_sample_size():
    # chain x -> y -> z has I(X;Z|Y) = 0; K = 100 is the constant calibrated in scripts/calibrate_cmi.py
    K, eps, delta, d = 100, 0.1, 0.1, 3
    n = int(math.ceil(K * math.log(d / delta) / eps))
    sem = GaussianSem.from_edges(3, [(0, 1, 0.5), (1, 2, 0.5)])
    reps = 400
    accepted = sum(not cmi_test(sample_covariance(sample(sem, n, "gaussian", s)), 0, 2, 1, eps)[1]
                   for s in range(reps))
    assert accepted / reps >= 1 - delta


def test_variance_and_covariance_concentration():
    # |s^2 - sigma^2| <= t sigma^2 and |s_xy - sigma_xy| <= t sigma_x sigma_y at n = 4000, t = 0.1
    sem = GaussianSem.from_edges(2, [(0, 1, 0.5)])
    sigma = sem_to_covariance(sem)
    t, ok_var, ok_cov, trials = 0.1, 0, 0, 1000
    rng = np.random.default_rng(5)
    for _ in range(trials):
        S = sample_covariance(sample(sem, 4000, "gaussian", rng))
        ok_var += abs(S[1, 1] - sigma[1, 1]) <= t * sigma[1, 1]
        ok_cov += abs(S[0, 1] - sigma[0, 1]) <= t * math.sqrt(sigma[0, 0] * sigma[1, 1])
    assert ok_var / trials >= 0.99 and ok_cov / trials >= 0.99


def test_partial_correlation_tail_bounded_by_exponential():
    # frequencies of |rho_hat - rho| >= delta decay with n and sit under exp(-C (n - 1) delta^2) for a fitted C
    sem = GaussianSem.from_edges(3, [(0, 1, 0.5), (1, 2, 0.5)])
    sigma = sem_to_covariance(sem)
    delta = 0.1
    rng = np.random.default_rng(9)
    freqs = []
    for n in (250, 1000, 4000):
        hits = 0
        for _ in range(500):
            S = sample_covariance(sample(sem, n, "gaussian", rng))
            hits += abs(partial_correlation(S, 0, 2).value - partial_correlation(sigma, 0, 2).value) >= delta
        freqs.append(hits / 500)
    assert freqs[0] > freqs[1] >= freqs[2]
    # fit C from the first point (the only one with many hits) and check it bounds the rest
    C = -math.log(max(freqs[0], 1e-3)) / ((250 - 1) * delta**2)
    assert C > 0
    for n, f in zip((250, 1000, 4000), freqs):
        assert f <= math.exp(-C * (n - 1) * delta**2) + 1e-12
