import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inarlab.models import BetaMixing, Degenerate, InarModel, RandomizedModel
from inarlab.rng import RngStream
from inarlab.sampling import (
    binomial_thin,
    sample_mixing,
    sample_poisson,
    simulate_inar_path,
    simulate_inar_paths,
    simulate_randomized_ensemble,
    simulate_stationary_prefix,
)

R = 10**6


def test_sample_poisson_determinism_and_validation():
    s = RngStream(11, 3)
    assert sample_poisson(4.0, s) == sample_poisson(4.0, s)
    with pytest.raises(ValueError):
        sample_poisson(0.0, s)


def test_sample_poisson_mean_within_clt_band():
    draws = sample_poisson(4.0, RngStream(1), size=R)
    assert abs(draws.mean() - 4.0) < 4.0 * math.sqrt(4.0 / R)


def test_sample_poisson_zero_probability():
    draws = sample_poisson(1.0, RngStream(2), size=R)
    p0 = math.exp(-1.0)
    se = math.sqrt(p0 * (1 - p0) / R)
    assert abs((draws == 0).mean() - p0) < 4 * se


def test_binomial_thin_edges_and_moments():
    assert binomial_thin(0, 0.7, RngStream(3)) == 0
    assert binomial_thin(7, 1.0, RngStream(3)) == 7
    draws = binomial_thin(10, 0.3, RngStream(4), size=R)
    assert abs(draws.mean() - 3.0) < 4 * math.sqrt(2.1 / R)
    with pytest.raises(ValueError):
        binomial_thin(5, 1.5, RngStream(3))


@settings(max_examples=200, deadline=None)
@given(x=st.integers(min_value=0, max_value=10**6), alpha=st.floats(0.0, 1.0), seed=st.integers(0, 2**32))
def test_thinning_never_exceeds_population(x, alpha, seed):
    assert binomial_thin(x, alpha, RngStream(seed)) <= x


def test_sample_mixing_degenerate_and_beta_mean():
    assert sample_mixing(Degenerate(0.3), RngStream(5)) == 0.3
    draws = sample_mixing(BetaMixing(0.0, 0.5), RngStream(6), size=R)
    se = math.sqrt(stats_var_beta(1.0, 1.5) / R)
    assert abs(draws.mean() - 0.4) < 4 * se


def stats_var_beta(a, b):
    return a * b / ((a + b) ** 2 * (a + b + 1.0))


def test_simulate_inar_path_shape_and_determinism():
    model = InarModel(1.0, 0.5)
    p1 = simulate_inar_path(model, 20, RngStream(7))
    p2 = simulate_inar_path(model, 20, RngStream(7))
    assert p1.shape == (21,)
    assert np.array_equal(p1, p2)
    with pytest.raises(ValueError):
        simulate_inar_path(model, 0, RngStream(7))


def test_stationary_marginal_mean_at_k3():
    model = InarModel(1.0, 0.5)
    paths = simulate_inar_paths(model, 10**5, 3, RngStream(8))
    se = math.sqrt(2.0 / 10**5)
    assert abs(paths[:, 3].mean() - 2.0) < 4 * se


def test_lag_one_autocorrelation():
    model = InarModel(2.0, 0.5)
    path = simulate_inar_path(model, 10**6, RngStream(9)).astype(float)
    x, y = path[:-1], path[1:]
    corr = np.corrcoef(x, y)[0, 1]
    assert abs(corr - 0.5) < 0.01


def test_stationary_zero_probability():
    model = InarModel(1.0, 0.5)
    paths = simulate_inar_paths(model, 10**5, 1, RngStream(10))
    p0 = math.exp(-2.0)
    se = math.sqrt(p0 * (1 - p0) / 10**5)
    assert abs((paths[:, 0] == 0).mean() - p0) < 4 * se


def test_stationary_pmf_cells():
    # marginal at a later time against the Poisson(2) pmf on {0..20}; the
    # gate is an exact binomial test at the two-sided level of 4 sigma
    # (a plain 4*SE band is vacuous for far-tail cells with Rp << 1)
    from scipy.stats import binomtest

    model = InarModel(1.0, 0.5)
    paths = simulate_inar_paths(model, 10**5, 4, RngStream(11))
    xk = paths[:, 4]
    mu, r = 2.0, 10**5
    level = 6.3e-5  # 2 Phi(-4)
    for c in range(21):
        p = math.exp(-mu) * mu**c / math.factorial(c)
        count = int((xk == c).sum())
        assert binomtest(count, r, p).pvalue > level, (c, count, r * p)


def test_martingale_residuals():
    # M_k = X_k - alpha X_{k-1} - lam has mean 0 and variance lam (1 + alpha)
    model = InarModel(1.3, 0.6)
    paths = simulate_inar_paths(model, 200, 600, RngStream(12)).astype(float)
    m = paths[:, 1:] - model.alpha * paths[:, :-1] - model.lam
    vals = m.ravel()
    se_mean = vals.std(ddof=1) / math.sqrt(vals.size)
    assert abs(vals.mean()) < 4 * se_mean
    target_var = model.lam * (1 + model.alpha)
    se_var = np.var((vals - vals.mean()) ** 2) ** 0.5 / math.sqrt(vals.size)
    assert abs(vals.var(ddof=1) - target_var) < 4 * se_var


def test_ensemble_single_degenerate_copy_matches_plain_path():
    rmodel = RandomizedModel(1.0, Degenerate(0.5))
    stream = RngStream(13)
    alphas, paths = simulate_randomized_ensemble(rmodel, 1, 50, stream)
    plain = simulate_inar_path(InarModel(1.0, 0.5), 50, stream)
    assert alphas[0] == 0.5
    assert np.array_equal(paths[0], plain)


def test_ensemble_is_reproducible_per_copy():
    rmodel = RandomizedModel(1.0, BetaMixing(0.0, 2.0))
    a1, p1 = simulate_randomized_ensemble(rmodel, 5, 10, RngStream(14))
    a2, p2 = simulate_randomized_ensemble(rmodel, 5, 10, RngStream(14))
    assert np.array_equal(a1, a2) and np.array_equal(p1, p2)
    # copy j is a function of substream j only: a bigger ensemble starts the same
    a3, p3 = simulate_randomized_ensemble(rmodel, 8, 10, RngStream(14))
    assert np.array_equal(a3[:5], a1) and np.array_equal(p3[:5], p1)


def test_ensemble_first_moment_matches_quadrature():
    # E X_0 = lam E(1/(1-alpha)) = 1.5 for Beta(a=0, beta=2), lam=1
    rmodel = RandomizedModel(1.0, BetaMixing(0.0, 2.0))
    _, paths = simulate_stationary_prefix(rmodel, 10**5, 1, RngStream(15))
    x0 = paths[:, 0]
    se = x0.std(ddof=1) / math.sqrt(x0.size)
    assert abs(x0.mean() - 1.5) < 4 * se


def test_ensemble_alpha_marginal_mean():
    rmodel = RandomizedModel(1.0, BetaMixing(0.0, 0.5))
    alphas, _ = simulate_stationary_prefix(rmodel, 10**6, 1, RngStream(16))
    se = math.sqrt(stats_var_beta(1.0, 1.5) / 10**6)
    assert abs(alphas.mean() - 0.4) < 4 * se
    alphas2, _ = simulate_randomized_ensemble(rmodel, 2 * 10**4, 1, RngStream(17))
    se2 = math.sqrt(stats_var_beta(1.0, 1.5) / alphas2.size)
    assert abs(alphas2.mean() - 0.4) < 4 * se2
