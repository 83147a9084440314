import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inarlab.analytics import limit_constants_from
from inarlab.limits import (
    FBM,
    Bridge,
    GaussianLine,
    MixtureBM,
    RandomSlopeLine,
    ScaledBM,
    SkewedStableLine,
    SubordinatedLevy,
    SymmetricStableLine,
    fbm_cov,
    law_cov,
    limit_cf,
    sample_fbm,
    sample_limit_path,
    sample_positive_stable,
    sample_stable_symmetric,
)
from inarlab.models import BetaMixing
from inarlab.rng import RngStream

R = 10**6


def test_fbm_cov_values():
    assert fbm_cov(0.7, 1.0, 1.0) == pytest.approx(1.0)
    assert fbm_cov(1.0, 1.0, 2.0) == pytest.approx(1.0)  # Brownian case: min(t1, t2)
    assert fbm_cov(0.5, 1.0, 2.0) == pytest.approx(math.sqrt(2.0))
    with pytest.raises(ValueError):
        fbm_cov(2.5, 1.0, 1.0)


def test_fbm_sampler_covariance():
    draws = sample_fbm(0.5, [0.5, 1.0], RngStream(1), size=10**5)
    cov = np.cov(draws.T)
    for i, t1 in enumerate((0.5, 1.0)):
        for j, t2 in enumerate((0.5, 1.0)):
            target = fbm_cov(0.5, t1, t2)
            se = math.sqrt((cov[i, i] * cov[j, j] + cov[i, j] ** 2) / 10**5)
            assert abs(cov[i, j] - target) < 4 * se


def test_fbm_single_point_variance():
    draws = sample_fbm(0.5, [1.0], RngStream(2), size=10**5)
    var = draws[:, 0].var(ddof=1)
    assert abs(var - 1.0) < 4 * math.sqrt(2.0 / 10**5)


def test_fbm_brownian_increments_uncorrelated():
    grid = [0.25, 0.5, 0.75, 1.0]
    draws = sample_fbm(1.0, grid, RngStream(3), size=10**5)
    inc = np.diff(np.concatenate([np.zeros((draws.shape[0], 1)), draws], axis=1), axis=1)
    corr = np.corrcoef(inc.T)
    off = corr[~np.eye(4, dtype=bool)]
    assert np.max(np.abs(off)) < 4.0 / math.sqrt(10**5)


def test_fbm_self_similarity_of_the_kernel():
    beta, c = 0.6, 1.7
    grid = np.array([0.2, 0.5, 0.9])
    for t1 in grid:
        for t2 in grid:
            assert fbm_cov(beta, c * t1, c * t2) == pytest.approx(
                c ** (2.0 - beta) * fbm_cov(beta, t1, t2), rel=1e-12
            )


# ---------------------------------------------------------------------------
# stable samplers
# ---------------------------------------------------------------------------


def test_symmetric_stable_gaussian_edge():
    x = sample_stable_symmetric(2.0, 1.0, RngStream(4), size=R)
    se = math.sqrt(2.0) * 2.0 / math.sqrt(R)
    assert abs(x.var(ddof=1) - 2.0) < 4 * se


def test_symmetric_stable_cauchy_cf():
    K = 1.3
    x = sample_stable_symmetric(1.0, K, RngStream(5), size=R)
    assert abs(np.median(x)) < 4 * 1.6 / math.sqrt(R)  # median SE ~ (2 f(0) sqrt(R))^-1
    for th in (0.5, 1.0, 2.0):
        emp = np.exp(1j * th * x).mean()
        se = math.sqrt((1 - abs(emp) ** 2) / R)
        assert abs(emp - math.exp(-K * th)) < 4 * se


def test_symmetric_stable_t46_constant():
    K = limit_constants_from(-0.5, 1.0, 2.0).K_beta  # 2 sqrt(pi)
    x = sample_stable_symmetric(1.0, K, RngStream(6), size=R)
    for th in (0.5, 1.0, 2.0):
        emp = np.exp(1j * th * x).mean()
        se = math.sqrt((1 - abs(emp) ** 2) / R)
        assert abs(emp - math.exp(-K * th)) < 4 * se


@settings(max_examples=20, deadline=None)
@given(index=st.floats(0.4, 2.0), seed=st.integers(0, 1000))
def test_stable_scaling_property(index, seed):
    # (X1 + X2) / 2^(1/a) is again distributed like X: compare CFs at one theta
    r = 200_000
    gen = RngStream(seed, 999).generator()
    x = sample_stable_symmetric(index, 1.0, gen, size=2 * r)
    y = (x[:r] + x[r:]) / 2.0 ** (1.0 / index)
    th = 1.0
    phi_y = np.exp(1j * th * y).mean()
    target = math.exp(-(th**index))
    se = math.sqrt((1 - abs(phi_y) ** 2) / r)
    assert abs(phi_y - target) < 5 * se


def test_positive_stable_laplace_and_positivity():
    for beta in (-0.5, 0.0, 0.5):
        kb = 1.7
        y = sample_positive_stable(beta, kb, RngStream(7), size=R)
        assert np.all(y > 0)
        rho = (1 + beta) / 2.0
        for th in (0.5, 1.0, 2.0):
            vals = np.exp(-th * y)
            emp = vals.mean()
            se = vals.std(ddof=1) / math.sqrt(R)
            assert abs(emp - math.exp(-kb * th**rho)) < 4 * se


def test_positive_stable_levy_tail_slope():
    # beta = 0: index 1/2, so log P(Y > y) ~ -(1/2) log y for large y
    y = sample_positive_stable(0.0, 1.0, RngStream(8), size=R)
    qs = np.quantile(y, [0.99, 0.999, 0.9999])
    levels = np.array([1e-2, 1e-3, 1e-4])
    slope = np.polyfit(np.log(qs), np.log(levels), 1)[0]
    assert abs(slope + 0.5) < 0.05 * 0.5


# ---------------------------------------------------------------------------
# limit-law paths and CFs
# ---------------------------------------------------------------------------


def test_bridge_endpoint_is_zero():
    law = Bridge(ScaledBM(2.0))
    draws = sample_limit_path(law, [0.5, 1.0], RngStream(9), size=1000)
    assert np.all(draws[:, 1] == 0.0)


def test_bridge_only_wraps_supported_laws():
    with pytest.raises(ValueError):
        Bridge(GaussianLine(1.0))


def test_subordinated_increments_heavy_tailed():
    law = SubordinatedLevy(0.0, 1.0)
    draws = sample_limit_path(law, [0.5, 1.0], RngStream(10), size=10**5)
    inc = draws[:, 1] - draws[:, 0]
    k = ((inc - inc.mean()) ** 4).mean() / inc.var() ** 2
    assert k > 3.0


def test_random_slope_moments():
    mix = BetaMixing(0.0, 2.0)
    law = RandomSlopeLine(1.0, mix, 1.5)
    draws = sample_limit_path(law, [1.0], RngStream(11), size=R)[:, 0]
    se = draws.std(ddof=1) / math.sqrt(R)
    assert abs(draws.mean()) < 4 * se
    # Var(lam/(1-a)) = E (1-a)^-2 - 1.5^2 = 3 - 2.25
    assert abs(draws.var(ddof=1) - 0.75) < 0.05


def test_limit_cf_reference_values():
    assert limit_cf(ScaledBM(1.5), 0.0, 1.0) == 1.0
    sig = 1.5
    assert limit_cf(ScaledBM(sig), 0.7, 1.0) == pytest.approx(math.exp(-sig**2 * 0.49 / 2))
    K = limit_constants_from(-0.5, 1.0, 2.0).K_beta
    line = SymmetricStableLine(1.0, K)
    for th in (0.3, 1.1):
        assert limit_cf(line, th, 1.0) == pytest.approx(math.exp(-K * th), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(theta=st.floats(-5, 5), t=st.floats(0.05, 2.0))
def test_limit_cf_hermitian_and_bounded(theta, t):
    laws = [
        ScaledBM(1.3),
        FBM(0.5, 2.0),
        SymmetricStableLine(1.5, 0.8),
        GaussianLine(0.7),
        SkewedStableLine(0.5, -3.5449),
        SubordinatedLevy(0.0, 2.5),
        Bridge(ScaledBM(1.0)),
        MixtureBM(1.0, BetaMixing(0.0, 2.0)),
    ]
    for law in laws:
        val = limit_cf(law, theta, t)
        assert abs(val) <= 1.0 + 1e-12
        assert limit_cf(law, -theta, t) == pytest.approx(val.conjugate(), rel=1e-9, abs=1e-9)


def test_law_cov_bridge_formula():
    law = Bridge(ScaledBM(2.0))
    assert law_cov(law, 0.3, 0.6) == pytest.approx(4.0 * (0.3 - 0.3 * 0.6), rel=1e-12)
    with pytest.raises(TypeError):
        law_cov(SymmetricStableLine(1.0, 1.0), 0.5, 0.5)


def test_mixture_bm_cf_matches_sampling():
    law = MixtureBM(1.0, BetaMixing(0.0, 2.0))
    draws = sample_limit_path(law, [0.5, 1.0], RngStream(12), size=200_000)
    for gi, t in enumerate((0.5, 1.0)):
        for th in (0.5, 1.0):
            emp = np.exp(1j * th * draws[:, gi]).mean()
            se = math.sqrt((1 - abs(emp) ** 2) / draws.shape[0])
            assert abs(emp - limit_cf(law, th, t)) < 4 * se


def test_skewed_stable_cf_matches_sampling():
    law = SkewedStableLine(0.5, -3.5449077018)
    draws = sample_limit_path(law, [1.0], RngStream(13), size=R)[:, 0]
    for th in (0.5, 1.0, 2.0):
        emp = np.exp(1j * th * draws).mean()
        se = math.sqrt((1 - abs(emp) ** 2) / R)
        assert abs(emp - limit_cf(law, th, 1.0)) < 4 * se
