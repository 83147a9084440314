"""Model and mixing-law types.

An :class:`InarModel` is the deterministic-coefficient process: Poisson
innovations with mean ``lam`` and binomial thinning with survival probability
``alpha``.  A :class:`RandomizedModel` replaces ``alpha`` by a draw from a
mixing law; the process is run conditionally on that draw.

Mixing laws on (0, 1):

* :class:`Degenerate` -- point mass (the deterministic special case),
* :class:`BetaMixing` -- density ``psi(x) (1-x)**beta`` with
  ``psi(x) = B(a+1, beta+1)^{-1} x**a``, i.e. alpha ~ Beta(a+1, beta+1),
* :class:`GeneralMixing` -- density ``psi(x) (1-x)**beta`` for a user
  supplied bounded factor ``psi`` with a positive limit ``psi1`` at 1,
* :class:`AtomsMixing` -- finite discrete law (used for closed-form
  cross-checks of the non-Markov gap; it has no density).

Every law exposes ``expect`` (exact or quadrature-based expectation),
``survival`` and ``sample``; the density laws also report ``(beta, psi1)``
which parameterize all the limit constants.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

__all__ = [
    "InarModel",
    "MixingLaw",
    "Degenerate",
    "BetaMixing",
    "GeneralMixing",
    "AtomsMixing",
    "RandomizedModel",
]

_NORMALIZATION_TOL = 1e-8
_REJECTION_CAP = 10**6
# draws are confined one ulp inside (0, 1): for beta < 0 the event of a draw
# rounding to exactly 1.0 has probability ~ (1 ulp)^(beta+1) per draw, which
# large ensembles hit regularly, and it would make 1/(1-alpha) infinite
_ALPHA_HI = float(np.nextafter(1.0, 0.0))
_ALPHA_LO = float(np.nextafter(0.0, 1.0))


def _confine(draws):
    return np.clip(draws, _ALPHA_LO, _ALPHA_HI)


@dataclass(frozen=True)
class InarModel:
    """Stationary INAR(1) with Poisson(lam) innovations and thinning alpha."""

    lam: float
    alpha: float

    def __post_init__(self) -> None:
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be a positive real, got {self.lam}")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie strictly inside (0, 1), got {self.alpha}")

    @property
    def stationary_mean(self) -> float:
        return self.lam / (1.0 - self.alpha)


class MixingLaw:
    """Base class for the law of the random thinning coefficient.

    Subclasses expose ``beta`` (the exponent of (1-x) in the density) and
    ``psi1`` (the limit of the density factor at 1); both are None for laws
    without a density of that form.
    """

    def expect(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        """E[f(alpha)] for a (vectorizable) bounded-on-compacts integrand."""
        raise NotImplementedError

    def expect_power(self, f: Callable[[np.ndarray], np.ndarray], ell: int) -> float:
        """E[f(alpha) (1-alpha)^{-ell}] with the endpoint weight handled exactly.

        The integrable singularity at 1 is folded into the quadrature weight
        rather than the integrand, so moments like E(alpha^k (1-alpha)^{-ell})
        are accurate even when beta - ell is close to -1.
        """
        raise NotImplementedError

    def survival(self, x: float) -> float:
        """P(alpha > x)."""
        raise NotImplementedError

    def sample(self, gen: np.random.Generator, size: int | None = None):
        """Draw from the law using the supplied generator."""
        raise NotImplementedError

    @property
    def is_degenerate(self) -> bool:
        return False


@dataclass(frozen=True)
class Degenerate(MixingLaw):
    """Point mass at alpha0; the model degenerates to a plain INAR(1)."""

    alpha0: float

    beta = None
    psi1 = None

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha0 < 1.0):
            raise ValueError(f"alpha0 must lie in (0, 1), got {self.alpha0}")

    def expect(self, f):
        return float(np.asarray(f(np.asarray(self.alpha0))))

    def expect_power(self, f, ell):
        return float(np.asarray(f(np.asarray(self.alpha0)))) / (1.0 - self.alpha0) ** ell

    def survival(self, x):
        return 1.0 if self.alpha0 > x else 0.0

    def sample(self, gen, size=None):
        # consumes no randomness; a degenerate copy is reproducibly identical
        # to the plain INAR(1) path drawn from the same stream
        if size is None:
            return self.alpha0
        return np.full(size, self.alpha0)

    @property
    def is_degenerate(self) -> bool:
        return True


def _qaws(f: Callable[[float], float], c: float, lo: float = 0.0, hi: float = 1.0) -> float:
    """Integrate f(x) * (1-x)**c over (lo, hi) with the endpoint weight exact.

    The integrand is evaluated just inside the interval (QAWS may probe the
    endpoints themselves, where model integrands are allowed to blow up in a
    way the weight absorbs).  Non-convergence raises instead of returning a
    silently bad value.
    """
    if c <= -1.0:
        raise ValueError("endpoint exponent must exceed -1 for integrability")

    def safe(x: float) -> float:
        x = min(max(x, 1e-300), 1.0 - 1e-16)
        return f(x)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(
            safe, lo, hi, weight="alg", wvar=(0.0, c), epsabs=1e-12, epsrel=1e-11, limit=300
        )
    if not math.isfinite(val) or err > 1e-7 * max(1.0, abs(val)):
        raise ArithmeticError(
            f"weighted quadrature failed to converge (value {val:.6g}, error {err:.2g})"
        )
    return val


@dataclass(frozen=True)
class BetaMixing(MixingLaw):
    """alpha ~ Beta(a+1, beta+1), written as psi(x) (1-x)**beta with
    psi(x) = Gamma(a+beta+2) / (Gamma(a+1) Gamma(beta+1)) * x**a."""

    a: float
    beta: float

    def __post_init__(self) -> None:
        if not self.a > -1.0:
            raise ValueError(f"a must exceed -1, got {self.a}")
        if not self.beta > -1.0:
            raise ValueError(f"beta must exceed -1, got {self.beta}")

    @property
    def psi1(self) -> float:
        return special.gamma(self.a + self.beta + 2.0) / (
            special.gamma(self.a + 1.0) * special.gamma(self.beta + 1.0)
        )

    def psi(self, x):
        return self.psi1 * np.asarray(x) ** self.a

    def expect(self, f):
        return self.expect_power(f, 0)

    def expect_power(self, f, ell):
        c = self.beta - ell
        if c <= -1.0:
            return math.inf
        return _qaws(lambda x: float(f(np.asarray(x))) * float(self.psi(x)), c)

    def survival(self, x):
        if x <= 0.0:
            return 1.0
        if x >= 1.0:
            return 0.0
        return float(special.betaincc(self.a + 1.0, self.beta + 1.0, x))

    def sample(self, gen, size=None):
        draws = _confine(gen.beta(self.a + 1.0, self.beta + 1.0, size=size))
        return float(draws) if size is None else draws


@dataclass(frozen=True)
class GeneralMixing(MixingLaw):
    """Density psi(x) (1-x)**beta for a user-supplied bounded factor psi.

    ``psi1`` is the limit of psi at 1 (taken as given, not estimated) and
    ``psi_sup`` a bound psi <= psi_sup on (0, 1) used as the rejection
    envelope against the Beta(1, beta+1) proposal.
    """

    psi: Callable[[np.ndarray], np.ndarray]
    beta: float
    psi1: float
    psi_sup: float
    validate: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        if not self.beta > -1.0:
            raise ValueError(f"beta must exceed -1, got {self.beta}")
        if not self.psi1 > 0.0:
            raise ValueError("psi1 must be positive")
        if not self.psi_sup > 0.0:
            raise ValueError("psi_sup must be positive")
        if self.validate:
            self._check_normalization()
            self._check_limit()

    def _check_normalization(self) -> None:
        total = _qaws(lambda x: float(np.asarray(self.psi(np.asarray(x)))), self.beta)
        if abs(total - 1.0) > _NORMALIZATION_TOL:
            raise ValueError(
                f"psi(x)(1-x)^beta must integrate to 1, got {total:.12g}"
            )

    def _check_limit(self) -> None:
        xs = 1.0 - 10.0 ** (-np.arange(4, 9, dtype=float))
        vals = np.asarray(self.psi(xs), dtype=float)
        if np.any(vals > self.psi_sup * (1.0 + 1e-9)):
            raise ValueError("psi exceeds its declared envelope psi_sup near 1")
        dev = abs(vals[-1] - self.psi1)
        if dev > 1e-6 + 1e-3 * abs(self.psi1):
            raise ValueError(
                f"psi(1-1e-8)={vals[-1]:.9g} is not consistent with psi1={self.psi1:.9g}"
            )

    def expect(self, f):
        return self.expect_power(f, 0)

    def expect_power(self, f, ell):
        c = self.beta - ell
        if c <= -1.0:
            return math.inf
        return _qaws(lambda x: float(f(np.asarray(x))) * float(np.asarray(self.psi(np.asarray(x)))), c)

    def survival(self, x):
        if x <= 0.0:
            return 1.0
        if x >= 1.0:
            return 0.0
        return _qaws(lambda t: float(np.asarray(self.psi(np.asarray(t)))), self.beta, lo=x)

    def sample(self, gen, size=None):
        scalar = size is None
        n = 1 if scalar else int(size)
        out = np.empty(n)
        filled = 0
        proposals = 0
        while filled < n:
            m = max(n - filled, 1024)
            cand = _confine(gen.beta(1.0, self.beta + 1.0, size=m))
            acc = gen.random(m) * self.psi_sup < np.asarray(self.psi(cand), dtype=float)
            take = min(int(acc.sum()), n - filled)
            out[filled : filled + take] = cand[acc][:take]
            filled += take
            proposals += m
            if proposals > _REJECTION_CAP * max(n, 1):
                raise RuntimeError(
                    "rejection sampler exceeded its proposal cap; psi_sup is "
                    "likely a gross over-estimate of sup psi"
                )
        return float(out[0]) if scalar else out


@dataclass(frozen=True)
class AtomsMixing(MixingLaw):
    """Finite discrete mixing law: P(alpha = points[i]) = weights[i].

    Not of the density form; used for exact two-term evaluations of the
    Markov-gap integrals and for property tests of the gap inequality.
    """

    points: tuple
    weights: tuple

    beta = None
    psi1 = None

    def __init__(self, points: Sequence[float], weights: Sequence[float]):
        pts = tuple(float(p) for p in points)
        wts = tuple(float(w) for w in weights)
        if len(pts) != len(wts) or not pts:
            raise ValueError("points and weights must be equal-length and nonempty")
        if any(not (0.0 < p < 1.0) for p in pts):
            raise ValueError("atoms must lie strictly inside (0, 1)")
        if any(w <= 0 for w in wts) or abs(sum(wts) - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)

    def expect(self, f):
        pts = np.asarray(self.points)
        return float(np.dot(np.asarray(f(pts), dtype=float), self.weights))

    def expect_power(self, f, ell):
        pts = np.asarray(self.points)
        vals = np.asarray(f(pts), dtype=float) / (1.0 - pts) ** ell
        return float(np.dot(vals, self.weights))

    def survival(self, x):
        return float(sum(w for p, w in zip(self.points, self.weights) if p > x))

    def sample(self, gen, size=None):
        idx = gen.choice(len(self.points), size=size, p=self.weights)
        pts = np.asarray(self.points)
        return float(pts[idx]) if size is None else pts[idx]

    @property
    def is_degenerate(self) -> bool:
        return len(self.points) == 1


@dataclass(frozen=True)
class RandomizedModel:
    """INAR(1) with random thinning coefficient drawn once per copy."""

    lam: float
    mixing: MixingLaw

    def __post_init__(self) -> None:
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be a positive real, got {self.lam}")
        if not isinstance(self.mixing, MixingLaw):
            raise TypeError("mixing must be a MixingLaw")

    def conditional(self, alpha: float) -> InarModel:
        return InarModel(self.lam, alpha)
