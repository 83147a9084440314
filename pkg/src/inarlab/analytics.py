"""Closed-form and quadrature analytics for the (randomized) INAR(1) model.

Everything here is deterministic: joint generating functions and their
Fourier inversion, autocovariances under the three centerings, mixing-law
moments with their finiteness criterion, the constants entering each limit
law, the non-Markov conditional-probability gap, the regular-variation and
tail asymptotics used as numeric cross-checks, and the normalized integral
that certifies the fractional-Brownian variance constant equals one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from .models import (
    AtomsMixing,
    BetaMixing,
    Degenerate,
    InarModel,
    MixingLaw,
    RandomizedModel,
)

__all__ = [
    "JointPgfForm",
    "Centering",
    "LimitConstants",
    "MarkovGapReport",
    "joint_pgf",
    "pgf_invert_pmf",
    "autocov",
    "mixing_moment",
    "limit_constants",
    "limit_constants_from",
    "double_geom_sum",
    "regvar_limit",
    "markov_gap",
    "fbm_variance_check",
    "tail_asymptotic",
]


class JointPgfForm(Enum):
    """The two equivalent formulas for the joint generating function."""

    PAIRWISE_FACTOR = "pairwise_factor"
    PRODUCT_WORD = "product_word"


class Centering(Enum):
    DETERMINISTIC = "deterministic"
    CONDITIONAL = "conditional"
    UNCONDITIONAL = "unconditional"


# ---------------------------------------------------------------------------
# joint generating function and pmf inversion
# ---------------------------------------------------------------------------


def _word_exponent(i: int, j: int, k: int) -> int:
    """Exponent of (1-alpha) attached to the interval [i, j] inside [0, k]."""
    if i == 0 and j == k:
        return -1
    if 1 <= i and j <= k - 1:
        return 1
    return 0


def joint_pgf(model: InarModel, z: Sequence[complex], form: JointPgfForm = JointPgfForm.PAIRWISE_FACTOR) -> complex:
    """Joint generating function E(z_0^{X_0} ... z_k^{X_k}) of a stationary window.

    Both formulas are implemented; they agree on the closed unit polydisc and
    the choice only affects rounding at the 1e-15 level.
    """
    z = np.asarray(z, dtype=complex)
    if z.ndim != 1 or z.size < 1:
        raise ValueError("z must be a nonempty vector")
    if np.any(np.abs(z) > 1.0 + 1e-12):
        raise ValueError("joint_pgf is only defined for |z_i| <= 1")
    k = z.size - 1
    lam, alpha = model.lam, model.alpha

    total = 0.0 + 0.0j
    if form is JointPgfForm.PAIRWISE_FACTOR:
        for i in range(k + 1):
            for j in range(i, k + 1):
                if i == j:
                    term = z[i] - 1.0
                else:
                    middle = np.prod(z[i + 1 : j]) if j > i + 1 else 1.0
                    term = alpha ** (j - i) * (z[i] - 1.0) * middle * (z[j] - 1.0)
                total += term
        return cmath.exp(lam / (1.0 - alpha) * total)
    if form is JointPgfForm.PRODUCT_WORD:
        for i in range(k + 1):
            for j in range(i, k + 1):
                word = np.prod(z[i : j + 1])
                total += (1.0 - alpha) ** _word_exponent(i, j, k) * alpha ** (j - i) * (word - 1.0)
        return cmath.exp(lam * total)
    raise ValueError(f"unknown form {form!r}")


def _pgf_on_root_grid(model: InarModel, k: int, m: int) -> np.ndarray:
    """Evaluate the joint PGF on the (m+1)^(k+1) grid of roots of unity."""
    roots = np.exp(2j * np.pi * np.arange(m + 1) / (m + 1))
    lam, alpha = model.lam, model.alpha
    shape = (m + 1,) * (k + 1)
    exponent = np.zeros(shape, dtype=complex)

    def axis_view(vec: np.ndarray, axis: int) -> np.ndarray:
        idx = [None] * (k + 1)
        idx[axis] = slice(None)
        return vec[tuple(idx)]

    for i in range(k + 1):
        for j in range(i, k + 1):
            if i == j:
                term = axis_view(roots - 1.0, i)
            else:
                term = alpha ** (j - i) * axis_view(roots - 1.0, i) * axis_view(roots - 1.0, j)
                for mid in range(i + 1, j):
                    term = term * axis_view(roots, mid)
            exponent = exponent + term
    return np.exp(lam / (1.0 - alpha) * exponent)


def pgf_invert_pmf(model: InarModel, k: int, max_count: int) -> np.ndarray:
    """Joint pmf of (X_0, ..., X_k) on {0..max_count}^{k+1} by DFT inversion.

    Exact up to aliasing of the Poisson tail beyond max_count; the folded
    mass is bounded analytically and the call fails if it exceeds 1e-6.
    """
    if not (0 <= k <= 3):
        raise ValueError("k must lie in 0..3 (dimension guard)")
    if not (1 <= max_count <= 64):
        raise ValueError("max_count must lie in 1..64")
    mu = model.stationary_mean
    tail = float((k + 1) * special.pdtrc(max_count, mu))
    if tail > 1e-6:
        raise ValueError(
            f"truncation mass {tail:.3g} beyond max_count={max_count} exceeds 1e-6"
        )
    grid = _pgf_on_root_grid(model, k, max_count)
    pmf = np.fft.fftn(grid).real / (max_count + 1) ** (k + 1)
    if pmf.min() < -1e-10:
        raise ArithmeticError(f"inversion produced mass {pmf.min():.3g} below -1e-10")
    pmf = np.clip(pmf, 0.0, None)
    total = pmf.sum()
    if abs(total - 1.0) > 1e-9:
        raise ArithmeticError(f"inverted pmf sums to {total:.12g}, not 1")
    return pmf / total


# ---------------------------------------------------------------------------
# moments and covariances
# ---------------------------------------------------------------------------


def mixing_moment(mixing: MixingLaw, k: int, ell: int) -> float:
    """E(alpha^k (1-alpha)^{-ell}); returns math.inf when the moment diverges.

    For density laws the moment is finite iff beta > ell - 1.  The Beta
    variant uses the Gamma closed form (via log-Gamma, stable for large k);
    other densities go through endpoint-weighted adaptive quadrature.
    """
    if k < 0 or ell < 0:
        raise ValueError("k and ell must be nonnegative integers")
    if isinstance(mixing, (Degenerate, AtomsMixing)):
        return mixing.expect_power(lambda x: x**k, ell)
    beta = mixing.beta
    if ell >= 1 and not beta > ell - 1:
        return math.inf
    if isinstance(mixing, BetaMixing):
        a = mixing.a
        # group the integer shift first: beta - (ell-1) keeps full precision
        # when beta sits just above the divergence threshold
        log_val = (
            special.gammaln(a + beta + 2.0)
            + special.gammaln(a + k + 1.0)
            + special.gammaln(beta - (ell - 1.0))
            - special.gammaln(a + 1.0)
            - special.gammaln(beta + 1.0)
            - special.gammaln(a + k + 1.0 + (beta - (ell - 1.0)))
        )
        return float(math.exp(log_val))
    return mixing.expect_power(lambda x: x**k, ell)


def autocov(model, k: int, centering: Centering = Centering.DETERMINISTIC) -> float:
    """Lag-k autocovariance of the stationary process under a centering.

    Deterministic: lam alpha^k / (1-alpha) for a fixed-coefficient model.
    Conditional:   lam E(alpha^k / (1-alpha))            (needs beta > 0)
    Unconditional: conditional + lam^2 Var((1-alpha)^-1)  (needs beta > 1)
    """
    if k < 0:
        raise ValueError("lag k must be nonnegative")
    if centering is Centering.DETERMINISTIC:
        if isinstance(model, RandomizedModel):
            if not model.mixing.is_degenerate:
                raise ValueError("deterministic centering needs a fixed alpha")
            model = model.conditional(model.mixing.expect(lambda x: x))
        return model.lam * model.alpha**k / (1.0 - model.alpha)
    if not isinstance(model, RandomizedModel):
        raise TypeError("conditional/unconditional centering needs a RandomizedModel")
    lam, mixing = model.lam, model.mixing
    mom = mixing_moment(mixing, k, 1)
    if math.isinf(mom):
        raise ValueError("E(alpha^k/(1-alpha)) diverges: needs beta > 0")
    if centering is Centering.CONDITIONAL:
        return lam * mom
    if centering is Centering.UNCONDITIONAL:
        m2 = mixing_moment(mixing, 0, 2)
        if math.isinf(m2):
            raise ValueError("Var((1-alpha)^-1) diverges: needs beta > 1")
        m1 = mixing_moment(mixing, 0, 1)
        return lam * mom + lam**2 * (m2 - m1**2)
    raise ValueError(f"unknown centering {centering!r}")


def double_geom_sum(alpha: float, n1: int, n2: int) -> float:
    """(1-alpha)^{-1} sum_{k<=n1} sum_{l<=n2} alpha^{|k-l|}, in closed form.

    This is the covariance kernel of partial sums: the lag-summed geometric
    double sum collapses to
    [(1-a^2) n1 - a (1 - a^{n2} - a^{n1} + a^{n2-n1})] / (1-a)^3.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")
    if not (1 <= n1 <= n2):
        raise ValueError("need 1 <= n1 <= n2")
    a = alpha
    num = (1.0 - a * a) * n1 - a * (1.0 - a**n2 - a**n1 + a ** (n2 - n1))
    return num / (1.0 - a) ** 3


# ---------------------------------------------------------------------------
# limit constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitConstants:
    """Constants of the iterated limit laws; fields outside their beta range are None.

    c_fbm      scale of the fractional Brownian limit,      beta in (0, 1)
    K_beta     symmetric-stable scale (CF exp(-K |t|^(2(1+b)))), beta in (-1, 0)
    k_beta     one-sided stable scale (Laplace exp(-k t^((1+b)/2))), beta in (-1, 1)
    sigma2     Brownian variance lam E((1+a)(1-a)^-2),      beta > 1
    w_var_43   Gaussian line variance lam psi1,             beta = 0
    w_var_411  Gaussian line variance lam^2 Var((1-a)^-1),  beta > 1
    omega_beta skewed-stable CF factor theta -> complex,    beta in (0, 1)
    """

    c_fbm: float | None = None
    K_beta: float | None = None
    k_beta: float | None = None
    sigma2: float | None = None
    w_var_43: float | None = None
    w_var_411: float | None = None
    omega_beta: Callable[[float], complex] | None = None


def _omega_beta_fn(psi1: float, lam: float, beta: float) -> Callable[[float], complex]:
    mag = psi1 * special.gamma(1.0 - beta) * lam ** (1.0 + beta) / (-beta * (1.0 + beta))
    phase = math.pi * (1.0 + beta) / 2.0

    def omega(theta: float) -> complex:
        s = np.sign(theta)
        return mag * np.exp(-1j * phase * s)

    return omega


def limit_constants_from(beta: float, psi1: float, lam: float) -> LimitConstants:
    """Constants determined by (beta, psi1, lam) alone; ranges enforced.

    The moment-based constants (sigma2, w_var_411) need the whole mixing law
    and are absent here; use :func:`limit_constants` for those.
    """
    if not beta > -1.0:
        raise ValueError("beta must exceed -1")
    if not (psi1 > 0 and lam > 0):
        raise ValueError("psi1 and lam must be positive")
    fields: dict = {}
    if 0.0 < beta < 1.0:
        fields["c_fbm"] = math.sqrt(
            2.0 * lam * psi1 * special.gamma(beta) / ((2.0 - beta) * (1.0 - beta))
        )
        fields["omega_beta"] = _omega_beta_fn(psi1, lam, beta)
    if -1.0 < beta < 0.0:
        fields["K_beta"] = psi1 * (lam / 2.0) ** (1.0 + beta) * special.gamma(-beta) / (1.0 + beta)
    if -1.0 < beta < 1.0:
        fields["k_beta"] = (
            (2.0 * lam) ** ((1.0 + beta) / 2.0)
            * psi1
            * special.gamma((1.0 - beta) / 2.0)
            / (1.0 + beta)
        )
    if beta == 0.0:
        fields["w_var_43"] = lam * psi1
    return LimitConstants(**fields)


def limit_constants(rmodel: RandomizedModel) -> LimitConstants:
    """Evaluate every limit constant whose beta range contains the mixing law."""
    lam = rmodel.lam
    mixing = rmodel.mixing
    fields: dict = {}

    second = mixing_moment(mixing, 0, 2)
    if math.isfinite(second):
        first = mixing_moment(mixing, 0, 1)
        alpha_second = mixing_moment(mixing, 1, 2)
        fields["sigma2"] = lam * (second + alpha_second)
        fields["w_var_411"] = lam**2 * (second - first**2)

    beta, psi1 = mixing.beta, mixing.psi1
    if beta is None or psi1 is None:
        return LimitConstants(**fields)
    core = limit_constants_from(beta, psi1, lam)
    for name in ("c_fbm", "K_beta", "k_beta", "w_var_43", "omega_beta"):
        val = getattr(core, name)
        if val is not None:
            fields[name] = val
    return LimitConstants(**fields)


# ---------------------------------------------------------------------------
# regular variation and tail asymptotics
# ---------------------------------------------------------------------------


def regvar_limit(
    mixing: MixingLaw, lam: float, k_list: Sequence[int]
) -> tuple[np.ndarray, float]:
    """k^beta E(alpha^k/(1-alpha)) along k_list, plus its limit psi1 Gamma(beta).

    The covariance of the conditionally centered process is regularly varying
    with index -beta; this exposes the normalized sequence and its limit.
    """
    beta = mixing.beta
    if beta is None or not (0.0 < beta < 1.0):
        raise ValueError("regular-variation limit requires a density mixing with beta in (0, 1)")
    ks = np.asarray(list(k_list), dtype=int)
    if np.any(ks < 1):
        raise ValueError("lags must be positive")
    vals = np.array([k**beta * mixing_moment(mixing, int(k), 1) for k in ks])
    return vals, float(mixing.psi1 * special.gamma(beta))


def tail_asymptotic(
    mixing: MixingLaw, lam: float, x_list: Sequence[float]
) -> tuple[np.ndarray, float]:
    """x^{(1+beta)/2} P(lam (1+alpha)/(1-alpha)^2 > x) and its limit.

    The event is inverted exactly: W > x iff alpha > 1 - 1/(1/4 + sqrt(x/(2 lam) + 1/16)),
    so each sequence value is one mixing-law survival evaluation.  The limit
    is psi1 (2 lam)^{(1+beta)/2} / (1+beta).
    """
    beta = mixing.beta
    if beta is None or not (-1.0 < beta < 1.0):
        raise ValueError("tail asymptotic requires a density mixing with beta in (-1, 1)")
    xs = np.asarray(list(x_list), dtype=float)
    if np.any(xs <= 0):
        raise ValueError("x values must be positive")
    expo = (1.0 + beta) / 2.0
    vals = np.empty_like(xs)
    for idx, x in enumerate(xs):
        h = 1.0 / (0.25 + math.sqrt(x / (2.0 * lam) + 1.0 / 16.0))
        vals[idx] = x**expo * mixing.survival(1.0 - h)
    limit = mixing.psi1 * (2.0 * lam) ** expo / (1.0 + beta)
    return vals, float(limit)


# ---------------------------------------------------------------------------
# non-Markov gap (Appendix-style conditional probabilities)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MarkovGapReport:
    """P(X_2=0 | X_1=1, X_0=0) minus P(X_2=0 | X_1=1) for the randomized model.

    The gap is nonnegative by Cauchy-Schwarz and vanishes exactly for a
    degenerate mixing law, which is the Markov (plain INAR) case.
    """

    p_cond2: float
    p_cond1: float
    gap: float


def _exp_weighted_mean(mixing: MixingLaw, lam: float, power: int) -> float:
    """E[(1-alpha)^power exp(-lam/(1-alpha))] for power in {-1, 0, 1}.

    Density laws are integrated after u = 1/(1-x), which turns the endpoint
    behavior into plain exponential decay; discrete laws sum exactly.
    """
    if isinstance(mixing, (Degenerate, AtomsMixing)):
        return mixing.expect(
            lambda x: (1.0 - np.asarray(x)) ** power * np.exp(-lam / (1.0 - np.asarray(x)))
        )
    beta = mixing.beta

    def integrand(u: float) -> float:
        x = 1.0 - 1.0 / u
        psi = float(np.asarray(mixing.psi(np.asarray(x))))
        return psi * u ** (-(beta + power) - 2.0) * math.exp(-lam * u)

    val, _err = integrate.quad(integrand, 1.0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=300)
    return val


def markov_gap(rmodel: RandomizedModel) -> MarkovGapReport:
    """Evaluate both conditional probabilities and their gap by quadrature."""
    lam, mixing = rmodel.lam, rmodel.mixing
    e_mid = _exp_weighted_mean(mixing, lam, 0)
    e_down = _exp_weighted_mean(mixing, lam, 1)
    e_up = _exp_weighted_mean(mixing, lam, -1)
    if e_mid <= 0 or e_up <= 0:
        raise ArithmeticError("quadrature of the conditional-probability integrals failed")
    p_cond2 = math.exp(-lam) * e_down / e_mid
    p_cond1 = math.exp(-lam) * e_mid / e_up
    return MarkovGapReport(p_cond2=p_cond2, p_cond1=p_cond1, gap=p_cond2 - p_cond1)


# ---------------------------------------------------------------------------
# fractional Brownian variance identity
# ---------------------------------------------------------------------------


def fbm_variance_check(beta: float) -> float:
    """((2-b)(1-b)/Gamma(b)) * integral_0^inf (e^-x - 1 + x) x^(b-3) dx.

    The integrand behaves like x^{b-1}/2 at the origin (handled by series)
    and like x^{b-2} at infinity (split off analytically); the normalized
    value equals 1 for every beta in (0, 1).
    """
    if not (0.0 < beta < 1.0):
        raise ValueError("beta must lie in (0, 1)")
    # integral over [0, 1]: expand e^-x - 1 + x = sum_{j>=2} (-x)^j / j!
    series = 0.0
    term_sign = 1.0
    fact = 2.0  # j! starting at j = 2
    j = 2
    while True:
        term = term_sign / (fact * (j + beta - 2.0))
        series += term
        if abs(term) < 1e-18:
            break
        j += 1
        fact *= j
        term_sign = -term_sign
    # integral over [1, inf): x^{b-2} - x^{b-3} split analytically, the
    # exponential part by adaptive quadrature
    tail_poly = 1.0 / (1.0 - beta) - 1.0 / (2.0 - beta)
    tail_exp, _err = integrate.quad(
        lambda x: math.exp(-x) * x ** (beta - 3.0), 1.0, np.inf, epsabs=1e-14, epsrel=1e-12
    )
    total = series + tail_poly + tail_exp
    return float((2.0 - beta) * (1.0 - beta) / special.gamma(beta) * total)
