import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from inarlab import analytics
from inarlab.analytics import (
    Centering,
    JointPgfForm,
    autocov,
    double_geom_sum,
    fbm_variance_check,
    joint_pgf,
    limit_constants,
    limit_constants_from,
    markov_gap,
    mixing_moment,
    pgf_invert_pmf,
    regvar_limit,
    tail_asymptotic,
)
from inarlab.models import AtomsMixing, BetaMixing, Degenerate, GeneralMixing, InarModel, RandomizedModel
from inarlab.rng import RngStream

MODEL = InarModel(1.0, 0.5)


# ---------------------------------------------------------------------------
# joint generating function
# ---------------------------------------------------------------------------


def test_pgf_normalization_at_one():
    for k in range(5):
        assert joint_pgf(MODEL, np.ones(k + 1)) == pytest.approx(1.0, abs=1e-14)


def test_pgf_zero_pair_probability():
    # P(X_0 = 0, X_1 = 0) = e^{-2} * 1 * e^{-1}
    val = joint_pgf(MODEL, [0.0, 0.0])
    assert val == pytest.approx(math.exp(-3.0), abs=1e-14)


def test_pgf_forms_agree_on_random_polydisc_points():
    gen = RngStream(100).generator()
    for _ in range(1000):
        k = int(gen.integers(0, 7))
        r = gen.random(k + 1) ** 0.5
        phi = gen.uniform(0, 2 * np.pi, k + 1)
        z = r * np.exp(1j * phi)
        a = joint_pgf(MODEL, z, JointPgfForm.PAIRWISE_FACTOR)
        b = joint_pgf(MODEL, z, JointPgfForm.PRODUCT_WORD)
        assert abs(a - b) < 1e-12


def test_pgf_marginalization_on_contiguous_blocks():
    gen = RngStream(101).generator()
    for _ in range(50):
        k = int(gen.integers(1, 6))
        z = gen.random(k + 1) * np.exp(1j * gen.uniform(0, 2 * np.pi, k + 1))
        # dropping the last coordinate
        a = joint_pgf(MODEL, np.append(z[:-1], 1.0))
        b = joint_pgf(MODEL, z[:-1])
        assert abs(a - b) < 1e-13
        # dropping the first coordinate: stationarity shifts the block
        c = joint_pgf(MODEL, np.insert(z[1:], 0, 1.0))
        d = joint_pgf(MODEL, z[1:])
        assert abs(c - d) < 1e-13


def test_pgf_domain_error():
    with pytest.raises(ValueError):
        joint_pgf(MODEL, [1.2, 0.5])


# ---------------------------------------------------------------------------
# pmf inversion
# ---------------------------------------------------------------------------


def test_pmf_inversion_k0_matches_poisson():
    pmf = pgf_invert_pmf(MODEL, 0, 30)
    target = stats.poisson.pmf(np.arange(31), 2.0)
    assert np.max(np.abs(pmf - target)) < 1e-10


def test_pmf_inversion_k1_cell_00():
    pmf = pgf_invert_pmf(MODEL, 1, 30)
    assert abs(pmf[0, 0] - math.exp(-3.0)) < 1e-10
    assert pmf.min() >= 0.0
    assert pmf.sum() == pytest.approx(1.0, abs=1e-12)


def test_pmf_inversion_matches_common_component_representation():
    # (X_0, X_1) equals (U+V, U+W) with U ~ Poi(lam a/(1-a)), V, W ~ Poi(lam)
    m = 30
    pmf = pgf_invert_pmf(MODEL, 1, m)
    u = stats.poisson.pmf(np.arange(m + 1), 1.0)   # lam * a/(1-a) = 1
    v = stats.poisson.pmf(np.arange(m + 1), 1.0)
    oracle = np.zeros((m + 1, m + 1))
    for uu in range(m + 1):
        block = u[uu] * v[: m + 1 - uu, None] * v[None, : m + 1 - uu]
        oracle[uu:, uu:] += block
    assert np.max(np.abs(pmf - oracle)) < 1e-9


def test_pmf_inversion_guards():
    with pytest.raises(ValueError):
        pgf_invert_pmf(MODEL, 4, 16)
    with pytest.raises(ValueError):
        pgf_invert_pmf(MODEL, 0, 128)
    with pytest.raises(ValueError):
        pgf_invert_pmf(InarModel(5.0, 0.9), 0, 64)  # stationary mean 50: tail too heavy


# ---------------------------------------------------------------------------
# moments, covariances, constants
# ---------------------------------------------------------------------------


def test_mixing_moment_total_mass():
    for mix in (Degenerate(0.3), BetaMixing(0.0, 0.5), AtomsMixing([0.2, 0.8], [0.4, 0.6])):
        assert mixing_moment(mix, 0, 0) == pytest.approx(1.0, abs=1e-10)


def test_mixing_moment_values_and_divergence():
    mix = BetaMixing(0.0, 0.5)
    assert mixing_moment(mix, 0, 1) == pytest.approx(3.0, abs=1e-9)
    assert math.isinf(mixing_moment(mix, 0, 2))
    assert math.isinf(mixing_moment(BetaMixing(0.0, -0.5), 5, 1))


@settings(max_examples=60, deadline=None)
@given(
    a=st.floats(-0.5, 3.0),
    beta=st.floats(-0.9, 4.0),
    k=st.integers(0, 6),
    ell=st.integers(0, 3),
)
def test_beta_moment_closed_form_equals_quadrature(a, beta, k, ell):
    if 0 < abs(beta - (ell - 1)) < 0.05:
        return  # quadrature cannot resolve a just-barely-integrable endpoint
    mix = BetaMixing(a, beta)
    closed = mixing_moment(mix, k, ell)
    if math.isinf(closed):
        assert beta <= ell - 1
        return
    quad = mix.expect_power(lambda x: x**k, ell)
    assert closed == pytest.approx(quad, rel=1e-9, abs=1e-9)


def test_beta_moment_survives_barely_integrable_endpoint():
    # beta just above ell-1: the moment is astronomically large but finite
    val = mixing_moment(BetaMixing(0.0, 1e-120), 0, 1)
    assert math.isfinite(val) and val > 1e100


def test_autocov_deterministic():
    m = InarModel(2.0, 0.5)
    assert autocov(m, 0, Centering.DETERMINISTIC) == pytest.approx(4.0)
    assert autocov(m, 2, Centering.DETERMINISTIC) == pytest.approx(1.0)


def test_autocov_conditional_and_ranges():
    rm = RandomizedModel(1.0, BetaMixing(0.0, 0.5))
    assert autocov(rm, 0, Centering.CONDITIONAL) == pytest.approx(3.0, abs=1e-9)
    with pytest.raises(ValueError):
        autocov(RandomizedModel(1.0, BetaMixing(0.0, -0.5)), 0, Centering.CONDITIONAL)
    with pytest.raises(ValueError):
        autocov(rm, 0, Centering.UNCONDITIONAL)  # beta = 0.5 <= 1
    rm2 = RandomizedModel(1.0, BetaMixing(0.0, 2.0))
    expect = 1.0 * mixing_moment(rm2.mixing, 3, 1) + 0.75
    assert autocov(rm2, 3, Centering.UNCONDITIONAL) == pytest.approx(expect, rel=1e-9)


def test_limit_constants_reference_values():
    c = limit_constants_from(-0.5, 1.0, 2.0)
    assert c.K_beta == pytest.approx(2.0 * math.sqrt(math.pi), rel=1e-12)
    c = limit_constants_from(0.5, 1.5, 1.0)
    assert c.c_fbm == pytest.approx(math.sqrt(4.0 * math.sqrt(math.pi)), rel=1e-12)
    full = limit_constants(RandomizedModel(1.0, BetaMixing(0.0, 2.0)))
    assert full.sigma2 == pytest.approx(4.5, rel=1e-9)
    assert full.w_var_411 == pytest.approx(0.75, rel=1e-9)
    assert full.c_fbm is None and full.K_beta is None and full.k_beta is None
    # beta = 0: Gamma(-beta) pole, so no symmetric-stable constant exists
    at_zero = limit_constants_from(0.0, 1.0, 1.0)
    assert at_zero.K_beta is None
    assert at_zero.w_var_43 == pytest.approx(1.0)


def test_omega_beta_phase_and_modulus():
    c = limit_constants_from(0.5, 1.5, 1.0)
    w = c.omega_beta(1.0)
    assert w.real > 0  # CF = exp(-|t|^(1+b) w): modulus must decay
    assert c.omega_beta(-1.0) == pytest.approx(w.conjugate())


def test_double_geom_sum_examples():
    assert double_geom_sum(0.5, 2, 3) == pytest.approx(7.5, abs=1e-12)
    assert double_geom_sum(0.5, 1, 1) == pytest.approx(2.0, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(
    alpha=st.floats(0.01, 0.99),
    n1=st.integers(1, 50),
    extra=st.integers(0, 30),
)
def test_double_geom_sum_equals_brute_force(alpha, n1, extra):
    n2 = n1 + extra
    brute = sum(alpha ** abs(k - l) for k in range(1, n1 + 1) for l in range(1, n2 + 1))
    assert double_geom_sum(alpha, n1, n2) == pytest.approx(brute / (1 - alpha), rel=1e-12, abs=1e-9)


# ---------------------------------------------------------------------------
# regular variation, tails, appendix checks
# ---------------------------------------------------------------------------


def test_regvar_limit_values():
    mix = BetaMixing(0.0, 0.5)
    vals, lim = regvar_limit(mix, 1.0, [1, 2, 200])
    assert lim == pytest.approx(1.5 * special.gamma(0.5), rel=1e-12)
    assert np.all(np.isfinite(vals))
    assert abs(vals[1] - lim) < abs(vals[0] - lim)  # monotone approach at small lags
    assert abs(vals[2] - lim) / lim < 0.02
    with pytest.raises(ValueError):
        regvar_limit(BetaMixing(0.0, 2.0), 1.0, [1])


def test_tail_asymptotic_values():
    mix = BetaMixing(0.0, 0.5)
    xs = [10.0, 100.0, 10**4]
    vals, lim = tail_asymptotic(mix, 1.0, xs)
    assert lim == pytest.approx(2.0**0.75, rel=1e-12)
    assert abs(vals[-1] - lim) / lim < 0.03
    # tail monotonicity of the raw probabilities
    surv = [v / x ** 0.75 for v, x in zip(vals, xs)]
    assert surv[0] >= surv[1] >= surv[2]
    with pytest.raises(ValueError):
        tail_asymptotic(BetaMixing(0.0, 2.0), 1.0, [10.0])


def test_markov_gap_degenerate_is_zero():
    rpt = markov_gap(RandomizedModel(1.0, Degenerate(0.5)))
    assert abs(rpt.gap) < 1e-10


def test_markov_gap_two_atom_oracle():
    # exact two-term sums, written out independently of the implementation
    lam, pts, wts = 1.0, (0.2, 0.8), (0.5, 0.5)
    e = [math.exp(-lam / (1 - p)) for p in pts]
    mid = sum(w * v for w, v in zip(wts, e))
    down = sum(w * (1 - p) * v for w, p, v in zip(wts, pts, e))
    up = sum(w * v / (1 - p) for w, p, v in zip(wts, pts, e))
    p2 = math.exp(-lam) * down / mid
    p1 = math.exp(-lam) * mid / up
    rpt = markov_gap(RandomizedModel(lam, AtomsMixing(pts, wts)))
    assert rpt.p_cond2 == pytest.approx(p2, abs=1e-10)
    assert rpt.p_cond1 == pytest.approx(p1, abs=1e-10)
    assert rpt.gap > 0


def test_markov_gap_nonnegative_across_mixings():
    gen = RngStream(200).generator()
    for _ in range(20):
        if gen.random() < 0.5:
            mix = BetaMixing(float(gen.uniform(-0.5, 2.0)), float(gen.uniform(-0.5, 3.0)))
        else:
            pts = np.sort(gen.uniform(0.05, 0.95, size=3))
            wts = gen.dirichlet(np.ones(3))
            mix = AtomsMixing(pts.tolist(), (wts / wts.sum()).tolist())
        rpt = markov_gap(RandomizedModel(float(gen.uniform(0.5, 2.0)), mix))
        assert rpt.gap >= -1e-8


def test_fbm_variance_check_is_one():
    for beta in (0.1, 0.25, 0.5, 0.75, 0.9):
        assert abs(fbm_variance_check(beta) - 1.0) < 1e-6
    with pytest.raises(ValueError):
        fbm_variance_check(1.5)
