"""Limit processes of the aggregation theorems: samplers and evaluators.

Each limit object can (a) sample finite-dimensional marginals on a time grid
and (b) evaluate the characteristic function of its marginal at a time point;
the Gaussian ones additionally expose their covariance function.  Stable
variates use Chambers-Mallows-Stuck (symmetric and skewed) and Kanter's
representation (positive one-sided); both are verified against their
characteristic/Laplace transforms rather than densities, which stable laws
do not generally have in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .models import MixingLaw
from .rng import as_stream

__all__ = [
    "LimitLaw",
    "ScaledBM",
    "FBM",
    "SymmetricStableLine",
    "GaussianLine",
    "SkewedStableLine",
    "RandomSlopeLine",
    "MixtureBM",
    "SubordinatedLevy",
    "Bridge",
    "fbm_cov",
    "law_cov",
    "sample_fbm",
    "sample_stable_symmetric",
    "sample_positive_stable",
    "sample_limit_path",
    "limit_cf",
]

_CHOLESKY_GRID_CAP = 1000


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return as_stream(rng).generator()


def _check_grid(t_grid) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("t_grid must be a nonempty 1-d array")
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing and positive")
    if t.size > _CHOLESKY_GRID_CAP:
        raise ValueError(f"t_grid longer than {_CHOLESKY_GRID_CAP} points")
    return t


# ---------------------------------------------------------------------------
# fractional Brownian motion
# ---------------------------------------------------------------------------


def fbm_cov(beta: float, t1: float, t2: float) -> float:
    """Covariance (t1^{2-b} + t2^{2-b} - |t2-t1|^{2-b}) / 2 of the Hurst-(1-b/2) fBm."""
    if not (0.0 < beta < 2.0):
        raise ValueError("beta must lie in (0, 2)")
    if t1 < 0 or t2 < 0:
        raise ValueError("times must be nonnegative")
    h2 = 2.0 - beta
    return 0.5 * (t1**h2 + t2**h2 - abs(t2 - t1) ** h2)


def _fbm_cov_matrix(beta: float, t: np.ndarray) -> np.ndarray:
    h2 = 2.0 - beta
    tt = t[:, None]
    return 0.5 * (tt**h2 + tt.T**h2 - np.abs(tt - tt.T) ** h2)


def sample_fbm(beta: float, t_grid, rng, size: int | None = None) -> np.ndarray:
    """Exact Gaussian draw(s) of fBm marginals on the grid via Cholesky."""
    t = _check_grid(t_grid)
    cov = _fbm_cov_matrix(beta, t)
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(
            "fBm grid covariance failed to factor; the grid is degenerate"
        ) from exc
    gen = _gen(rng)
    n = 1 if size is None else int(size)
    z = gen.standard_normal((n, t.size))
    out = z @ chol.T
    return out[0] if size is None else out


# ---------------------------------------------------------------------------
# stable variates
# ---------------------------------------------------------------------------


def _cms_standard(index: float, skew: float, gen: np.random.Generator, n: int) -> np.ndarray:
    """Chambers-Mallows-Stuck draws with CF exp(-|t|^a (1 - i skew sign(t) tan(pi a/2)))."""
    a = index
    u = gen.uniform(-math.pi / 2.0, math.pi / 2.0, size=n)
    e = gen.exponential(1.0, size=n)
    if a == 1.0 and skew == 0.0:
        return np.tan(u)
    ta = math.tan(math.pi * a / 2.0)
    b0 = math.atan(skew * ta) / a
    s0 = (1.0 + (skew * ta) ** 2) ** (1.0 / (2.0 * a))
    core = np.sin(a * (u + b0)) / np.cos(u) ** (1.0 / a)
    tail = (np.cos(u - a * (u + b0)) / e) ** ((1.0 - a) / a)
    return s0 * core * tail


def sample_stable_symmetric(index: float, scale_const: float, rng, size: int | None = None):
    """Symmetric stable draw(s) with CF exp(-scale_const |theta|^index).

    index = 2 is the Gaussian edge case (variance 2 scale_const), index = 1
    is Cauchy; everything in between comes from the same CMS routine.
    """
    if not (0.0 < index <= 2.0):
        raise ValueError("index must lie in (0, 2]")
    if not scale_const > 0:
        raise ValueError("scale_const must be positive")
    gen = _gen(rng)
    n = 1 if size is None else int(size)
    if index == 2.0:
        out = math.sqrt(2.0 * scale_const) * gen.standard_normal(n)
    else:
        out = scale_const ** (1.0 / index) * _cms_standard(index, 0.0, gen, n)
    return float(out[0]) if size is None else out


def sample_positive_stable(beta: float, k_beta: float, rng, size: int | None = None):
    """One-sided stable draw(s) with Laplace transform exp(-k_beta theta^((1+beta)/2)).

    Kanter's representation: with rho = (1+beta)/2, U uniform and E unit
    exponential,  (A(U)/E)^((1-rho)/rho)  has Laplace exp(-theta^rho), where
    A(u) = sin(rho pi u)^(rho/(1-rho)) sin((1-rho) pi u) / sin(pi u)^(1/(1-rho)).
    """
    if not (-1.0 < beta < 1.0):
        raise ValueError("beta must lie in (-1, 1)")
    if not k_beta > 0:
        raise ValueError("k_beta must be positive")
    rho = (1.0 + beta) / 2.0
    gen = _gen(rng)
    n = 1 if size is None else int(size)
    u = gen.uniform(0.0, 1.0, size=n)
    e = gen.exponential(1.0, size=n)
    log_a = (
        rho / (1.0 - rho) * np.log(np.sin(rho * math.pi * u))
        + np.log(np.sin((1.0 - rho) * math.pi * u))
        - 1.0 / (1.0 - rho) * np.log(np.sin(math.pi * u))
    )
    out = k_beta ** (1.0 / rho) * np.exp((1.0 - rho) / rho * (log_a - np.log(e)))
    return float(out[0]) if size is None else out


# ---------------------------------------------------------------------------
# limit-law descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledBM:
    """sigma * standard Brownian motion."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class FBM:
    """scale * fractional Brownian motion with Hurst 1 - beta/2."""

    beta: float
    scale: float

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ValueError("beta must lie in (0, 1), so the Hurst index is in (1/2, 1)")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def hurst(self) -> float:
        return 1.0 - self.beta / 2.0


@dataclass(frozen=True)
class SymmetricStableLine:
    """t -> V t with V symmetric stable, CF exp(-scale_const |theta|^index)."""

    index: float
    scale_const: float

    def __post_init__(self):
        if not (0.0 < self.index <= 2.0):
            raise ValueError("index must lie in (0, 2]")
        if not self.scale_const > 0:
            raise ValueError("scale_const must be positive")


@dataclass(frozen=True)
class GaussianLine:
    """t -> W t with W centered Gaussian."""

    variance: float

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError("variance must be positive")


@dataclass(frozen=True)
class SkewedStableLine:
    """t -> Z t with Z totally skewed (1+beta)-stable,
    CF exp(-|theta|^(1+beta) * coeff * exp(-i pi sign(theta) (1+beta)/2)).

    ``coeff`` is the signed real prefactor of the CF's angular factor; it is
    negative for beta in (0, 1), which still yields |CF| <= 1 because the
    angular cosine is negative as well.
    """

    beta: float
    coeff: float

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ValueError("beta must lie in (0, 1)")
        if not self.coeff * math.cos(math.pi * (1.0 + self.beta) / 2.0) > 0:
            raise ValueError("coeff must make the CF modulus decay (coeff * cos(pi(1+beta)/2) > 0)")


@dataclass(frozen=True)
class RandomSlopeLine:
    """t -> slope_scale (lam/(1-alpha) - E lam/(1-alpha)) t, alpha from the mixing law."""

    lam: float
    mixing: MixingLaw
    mean_inv: float
    slope_scale: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if not math.isfinite(self.mean_inv):
            raise ValueError("E(1/(1-alpha)) must be finite for the random-slope line")


@dataclass(frozen=True)
class MixtureBM:
    """sqrt(var_scale lam (1+alpha)) / (1-alpha) * B with alpha drawn once.

    The limit of the temporally aggregated single randomized copy: Brownian
    motion whose variance is mixed over the thinning coefficient.
    """

    lam: float
    mixing: MixingLaw
    var_scale: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")


@dataclass(frozen=True)
class SubordinatedLevy:
    """t -> sqrt(Y) B_t: the (1+beta)-stable Levy process as subordinated BM."""

    beta: float
    k_beta: float

    def __post_init__(self):
        if not (-1.0 < self.beta < 1.0):
            raise ValueError("beta must lie in (-1, 1)")
        if not self.k_beta > 0:
            raise ValueError("k_beta must be positive")


_BRIDGEABLE = (ScaledBM, FBM, SubordinatedLevy)


@dataclass(frozen=True)
class Bridge:
    """inner_t - t * inner_1: pins the inner process to 0 at time 1."""

    inner: Union[ScaledBM, FBM, SubordinatedLevy]

    def __post_init__(self):
        if not isinstance(self.inner, _BRIDGEABLE):
            raise ValueError(
                "bridges are only defined over the Brownian, fractional-Brownian "
                "and subordinated-Levy limits"
            )


LimitLaw = Union[
    ScaledBM,
    FBM,
    SymmetricStableLine,
    GaussianLine,
    SkewedStableLine,
    RandomSlopeLine,
    MixtureBM,
    SubordinatedLevy,
    Bridge,
]


# ---------------------------------------------------------------------------
# covariance / CF / sampling dispatch
# ---------------------------------------------------------------------------


def law_cov(law: LimitLaw, t1: float, t2: float) -> float:
    """Covariance function for the Gaussian-path laws (others raise)."""
    if isinstance(law, ScaledBM):
        return law.sigma**2 * min(t1, t2)
    if isinstance(law, FBM):
        return law.scale**2 * fbm_cov(law.beta, t1, t2)
    if isinstance(law, GaussianLine):
        return law.variance * t1 * t2
    if isinstance(law, Bridge):
        inner = law.inner
        if isinstance(inner, (ScaledBM, FBM)):
            return (
                law_cov(inner, t1, t2)
                - t2 * law_cov(inner, t1, 1.0)
                - t1 * law_cov(inner, t2, 1.0)
                + t1 * t2 * law_cov(inner, 1.0, 1.0)
            )
    raise TypeError(f"{type(law).__name__} has no deterministic covariance function")


def limit_cf(law: LimitLaw, theta: float, t: float) -> complex:
    """Characteristic function of the law's marginal at time t."""
    if not t > 0:
        raise ValueError("t must be positive")
    if theta == 0.0:
        return 1.0 + 0.0j
    if isinstance(law, (ScaledBM, FBM, GaussianLine)):
        return complex(math.exp(-0.5 * law_cov(law, t, t) * theta * theta))
    if isinstance(law, SymmetricStableLine):
        return complex(math.exp(-law.scale_const * abs(theta * t) ** law.index))
    if isinstance(law, SkewedStableLine):
        a = 1.0 + law.beta
        x = theta * t
        phase = np.exp(-1j * np.sign(x) * math.pi * a / 2.0)
        return complex(np.exp(-abs(x) ** a * law.coeff * phase))
    if isinstance(law, SubordinatedLevy):
        rho = (1.0 + law.beta) / 2.0
        return complex(math.exp(-law.k_beta * (0.5 * t * theta * theta) ** rho))
    if isinstance(law, RandomSlopeLine):
        return _random_slope_cf(law, theta * t * law.slope_scale)
    if isinstance(law, MixtureBM):
        c = 0.5 * theta * theta * t * law.var_scale * law.lam
        val = law.mixing.expect(
            lambda x: np.exp(-c * (1.0 + np.asarray(x)) / (1.0 - np.asarray(x)) ** 2)
        )
        return complex(val)
    if isinstance(law, Bridge):
        inner = law.inner
        if isinstance(inner, (ScaledBM, FBM)):
            return complex(math.exp(-0.5 * law_cov(law, t, t) * theta * theta))
        if isinstance(inner, SubordinatedLevy):
            rho = (1.0 + inner.beta) / 2.0
            spread = t * (1.0 - t) if t <= 1.0 else t * (t - 1.0)
            if spread == 0.0:
                return 1.0 + 0.0j
            return complex(math.exp(-inner.k_beta * (0.5 * spread * theta * theta) ** rho))
    raise TypeError(f"no closed-form marginal CF for {type(law).__name__}")


def _random_slope_cf(law: RandomSlopeLine, w: float) -> complex:
    """E exp(i w (lam/(1-alpha) - lam mu)) by Fourier-weighted quadrature.

    Substituting u = lam/(1-x) maps the oscillatory endpoint into a Fourier
    tail integral of g(u) = psi(1 - lam/u) u^(-beta-2), which QAWF handles.
    Discrete mixing laws are summed exactly instead.
    """
    from scipy import integrate as _integrate

    lam, mu, mixing = law.lam, law.mean_inv, law.mixing
    if w == 0.0:
        return 1.0 + 0.0j
    if mixing.beta is None:
        pts = np.asarray(getattr(mixing, "points", [getattr(mixing, "alpha0", None)]), dtype=float)
        wts = np.asarray(getattr(mixing, "weights", [1.0]), dtype=float)
        vals = np.exp(1j * w * (lam / (1.0 - pts) - lam * mu))
        return complex(np.dot(vals, wts))
    beta = mixing.beta
    aw = abs(w)

    def g(u: float) -> float:
        return float(np.asarray(mixing.psi(np.asarray(1.0 - lam / u)))) * u ** (-beta - 2.0)

    cos_part, _ = _integrate.quad(g, lam, np.inf, weight="cos", wvar=aw, epsabs=1e-11, limit=200)
    sin_part, _ = _integrate.quad(g, lam, np.inf, weight="sin", wvar=aw, epsabs=1e-11, limit=200)
    val = lam ** (1.0 + beta) * complex(cos_part, sin_part) * np.exp(-1j * aw * lam * mu)
    return val if w > 0 else val.conjugate()


def _gaussian_paths(cov: np.ndarray, gen: np.random.Generator, n: int) -> np.ndarray:
    chol = np.linalg.cholesky(cov)
    return gen.standard_normal((n, cov.shape[0])) @ chol.T


def sample_limit_path(law: LimitLaw, t_grid, rng, size: int | None = None) -> np.ndarray:
    """Sample marginals of the limit process on the grid: shape (G,) or (size, G)."""
    t = _check_grid(t_grid)
    gen = _gen(rng)
    n = 1 if size is None else int(size)

    if isinstance(law, ScaledBM):
        cov = law.sigma**2 * np.minimum(t[:, None], t[None, :])
        out = _gaussian_paths(cov, gen, n)
    elif isinstance(law, FBM):
        out = law.scale * sample_fbm(law.beta, t, gen, size=n)
    elif isinstance(law, SymmetricStableLine):
        v = sample_stable_symmetric(law.index, law.scale_const, gen, size=n)
        out = v[:, None] * t[None, :]
    elif isinstance(law, GaussianLine):
        v = math.sqrt(law.variance) * gen.standard_normal(n)
        out = v[:, None] * t[None, :]
    elif isinstance(law, SkewedStableLine):
        a = 1.0 + law.beta
        gamma = law.coeff * math.cos(math.pi * a / 2.0)
        v = gamma ** (1.0 / a) * _cms_standard(a, 1.0, gen, n)
        out = v[:, None] * t[None, :]
    elif isinstance(law, RandomSlopeLine):
        alpha = np.asarray(law.mixing.sample(gen, size=n), dtype=float)
        slope = law.slope_scale * (law.lam / (1.0 - alpha) - law.lam * law.mean_inv)
        out = slope[:, None] * t[None, :]
    elif isinstance(law, MixtureBM):
        alpha = np.asarray(law.mixing.sample(gen, size=n), dtype=float)
        sig = np.sqrt(law.var_scale * law.lam * (1.0 + alpha)) / (1.0 - alpha)
        cov = np.minimum(t[:, None], t[None, :])
        out = sig[:, None] * _gaussian_paths(cov, gen, n)
    elif isinstance(law, SubordinatedLevy):
        y = sample_positive_stable(law.beta, law.k_beta, gen, size=n)
        cov = np.minimum(t[:, None], t[None, :])
        out = np.sqrt(y)[:, None] * _gaussian_paths(cov, gen, n)
    elif isinstance(law, Bridge):
        if t[-1] < 1.0:
            inner_grid = np.append(t, 1.0)
            inner = sample_limit_path(law.inner, inner_grid, gen, size=n)
            out = inner[:, :-1] - t[None, :] * inner[:, -1:]
        else:
            idx_one = int(np.searchsorted(t, 1.0))
            if idx_one >= t.size or t[idx_one] != 1.0:
                raise ValueError("bridge grids must not extend beyond t = 1 without containing it")
            inner = sample_limit_path(law.inner, t, gen, size=n)
            out = inner - t[None, :] * inner[:, idx_one : idx_one + 1]
    else:
        raise TypeError(f"cannot sample {type(law).__name__}")
    return out[0] if size is None else out
