"""Doubly indexed partial sums: construction, centering, scaling, iteration.

Two routes produce samples of the aggregated partial-sum vector
``S_t = sum_{j<=N} sum_{k<=floor(nt)} (X_k^(j) - c_j)`` on a time grid:

* :func:`build_partial_sums` consumes simulated ensembles copy by copy --
  the literal definition, used at small scale and as the oracle;
* :func:`sample_aggregate` draws the aggregate exactly in law without
  simulating paths.  Conditionally on the copy coefficients, the window
  (X_0..X_n) of one copy is multivariate Poisson: an independent Poisson
  count lives on every index interval [i, j], with mean
  lam (1-a)^e(i,j) a^(j-i), and X_k sums the counts of intervals covering k.
  Summing copies superposes these Poisson fields, so the aggregate needs one
  count per interval *class* rather than per copy-step.  Partial sums weight
  each interval by its overlap with [1, m], which is piecewise linear in the
  interval position; runs of equal weight collapse to a single Poisson draw,
  and the linear ramps near the grid cutoffs are drawn either per position
  or per event, whichever is cheaper.

The two routes are verified against each other and against the closed-form
covariance kernel in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from . import analytics
from .limits import (
    FBM,
    Bridge,
    GaussianLine,
    LimitLaw,
    ScaledBM,
    SkewedStableLine,
    SubordinatedLevy,
    SymmetricStableLine,
)
from .models import InarModel, RandomizedModel
from .rng import RngStream, as_stream

__all__ = [
    "CenteringMode",
    "AggregationSpec",
    "IterationOrder",
    "RegimeScaling",
    "REGIMES",
    "lattice_cutoffs",
    "build_partial_sums",
    "sample_aggregate",
    "apply_scaling",
    "iterated_experiment",
    "ExperimentCell",
]

_TINY = 1e-300
_CHUNK = 256


class CenteringMode(Enum):
    UNCONDITIONAL = "unconditional"  # subtract E X = lam E((1-alpha)^-1), needs beta > 0
    CONDITIONAL = "conditional"      # subtract lam / (1 - alpha_j)
    EMPIRICAL_MEAN = "empirical_mean"  # subtract the per-copy time average over 1..n


def lattice_cutoffs(n: int, t_grid) -> np.ndarray:
    """floor(n t) per grid point; the 1e-9 nudge keeps the intended lattice
    point when t itself is not binary-representable (e.g. t = 0.3, n = 10)."""
    return np.floor(n * np.asarray(t_grid, dtype=float) + 1e-9).astype(np.int64)


@dataclass(frozen=True)
class AggregationSpec:
    """Shape of one aggregation experiment cell."""

    N: int
    n: int
    t_grid: tuple
    centering: CenteringMode
    replicates: int = 2000

    def __post_init__(self):
        if self.N < 1 or self.n < 1 or self.replicates < 1:
            raise ValueError("N, n and replicates must be positive")
        t = np.asarray(self.t_grid, dtype=float)
        if t.size == 0 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise ValueError("t_grid must be nonempty, positive, strictly increasing")
        object.__setattr__(self, "t_grid", tuple(float(x) for x in t))

    @property
    def cutoffs(self) -> np.ndarray:
        return lattice_cutoffs(self.n, self.t_grid)


def _mean_inverse(rmodel: RandomizedModel) -> float:
    mom = analytics.mixing_moment(rmodel.mixing, 0, 1)
    if math.isinf(mom):
        raise ValueError(
            "unconditional centering undefined: E((1-alpha)^-1) is finite only for beta > 0"
        )
    return mom


# ---------------------------------------------------------------------------
# direct route: partial sums of simulated ensembles
# ---------------------------------------------------------------------------


def build_partial_sums(ensembles, spec: AggregationSpec, model=None) -> np.ndarray:
    """Partial-sum vectors from explicit ensembles, one row per replicate.

    ``ensembles`` is a sequence of (alphas, paths) pairs as produced by
    :func:`inarlab.sampling.simulate_randomized_ensemble`; ``model`` (an
    :class:`InarModel` or :class:`RandomizedModel`) is needed for the
    unconditional centering constant and for deterministic-model input.
    Empirical-mean centering uses the integer identity
    S_hat(m) = (n T_m - m T_n) / n, which is exactly zero at m = n.
    """
    cutoffs = spec.cutoffs
    n = spec.n
    rows = []
    for alphas, paths in ([ensembles] if isinstance(ensembles, tuple) else list(ensembles)):
        paths = np.asarray(paths)
        if paths.ndim != 2 or paths.shape[0] != spec.N:
            raise ValueError(f"ensemble must hold N={spec.N} paths")
        if paths.shape[1] - 1 < max(int(cutoffs.max()), n):
            raise ValueError("ensemble paths are shorter than the aggregation window")
        csum = np.cumsum(paths[:, 1:], axis=1, dtype=np.int64)
        t_at = np.zeros((spec.N, cutoffs.size), dtype=np.int64)
        pos = cutoffs > 0
        t_at[:, pos] = csum[:, cutoffs[pos] - 1]
        if spec.centering is CenteringMode.EMPIRICAL_MEAN:
            t_n = csum[:, n - 1]
            if int(csum.max(initial=0)) < 2**62 // max(n, 1):
                num = n * t_at - cutoffs[None, :] * t_n[:, None]
                rows.append(num.sum(axis=0) / n)
            else:
                # float fallback for astronomically large counts; the identity
                # n T_n - n T_n = 0 at t = 1 still cancels exactly
                tf, tnf = t_at.astype(float), t_n.astype(float)
                rows.append((n * tf - cutoffs[None, :] * tnf[:, None]).sum(axis=0) / n)
        elif spec.centering is CenteringMode.CONDITIONAL:
            if model is None:
                raise TypeError("conditional centering needs the model for lam")
            centers = model.lam / (1.0 - np.asarray(alphas, dtype=float))
            rows.append(t_at.sum(axis=0) - cutoffs * centers.sum())
        elif spec.centering is CenteringMode.UNCONDITIONAL:
            if isinstance(model, RandomizedModel):
                mean = model.lam * _mean_inverse(model)
            elif isinstance(model, InarModel):
                mean = model.stationary_mean
            else:
                raise TypeError("unconditional centering needs the model")
            rows.append(t_at.sum(axis=0) - cutoffs * spec.N * mean)
        else:
            raise ValueError(f"unknown centering {spec.centering!r}")
    return np.asarray(rows, dtype=float)


# ---------------------------------------------------------------------------
# fast route: exact-law sampling of the aggregate via Poisson superposition
# ---------------------------------------------------------------------------


def _geometric_mass_table(alpha_chunk: np.ndarray, lam: float, n: int) -> np.ndarray:
    """a[r, d] = lam * sum_j alpha_{r,j}^d for d = 0..n, with width shrinking.

    Rows are sorted descending first (the sums are permutation invariant), so
    columns whose powers underflow can be dropped from the right as d grows.
    """
    a_sorted = -np.sort(-alpha_chunk, axis=1)
    rows = a_sorted.shape[0]
    out = np.empty((rows, n + 1))
    v = np.ones_like(a_sorted)
    width = a_sorted.shape[1]
    for d in range(n + 1):
        out[:, d] = lam * v[:, :width].sum(axis=1)
        if d == n:
            break
        v[:, :width] *= a_sorted[:, :width]
        if d % 64 == 63:
            block = v[:, :width]
            block[block < _TINY] = 0.0
            alive = np.flatnonzero(np.any(block > 0.0, axis=0))
            width = int(alive[-1]) + 1 if alive.size else 1
    return out


def _segments_for_lag(d: int, n: int, cutoffs: np.ndarray):
    """Constant-status segments of the interior positions i in [1, n-1-d].

    Returns (lo, hi, u, v) per segment: on (lo, hi] the weight of cutoff g at
    position i is u[g] + v[g] * i (v is 0 on plateaus and -1 on ramps).
    """
    right = n - 1 - d
    if right < 1:
        return []
    edges = {0, right}
    for m in cutoffs:
        f, q = m - d, m
        if 0 < f < right:
            edges.add(int(f))
        if 0 < q < right:
            edges.add(int(q))
    sorted_edges = sorted(edges)
    segs = []
    for lo, hi in zip(sorted_edges[:-1], sorted_edges[1:]):
        i0 = hi
        u = np.zeros(cutoffs.size)
        v = np.zeros(cutoffs.size)
        for g, m in enumerate(cutoffs):
            if i0 <= m - d:
                u[g] = d + 1
            elif i0 <= m:
                u[g] = m + 1
                v[g] = -1.0
            # else weight 0
        segs.append((lo, hi, u, v))
    return segs


def _draw_interior(
    gen: np.random.Generator,
    b: np.ndarray,
    n: int,
    cutoffs: np.ndarray,
    total: np.ndarray,
) -> None:
    """Add the interior-interval contributions for every lag d in place."""
    rows = b.shape[0]
    for d in range(0, n - 1):
        b_d = b[:, d]
        if not np.any(b_d > 0.0):
            continue
        segs = _segments_for_lag(d, n, cutoffs)
        position_mode = float(b_d.mean()) >= 1.0
        for lo, hi, u, v in segs:
            length = hi - lo
            if np.all(u == 0.0):
                continue
            if not np.any(v != 0.0):
                cnt = gen.poisson(length * b_d)
                total += cnt[:, None] * u[None, :]
            elif position_mode:
                cnt = gen.poisson(np.broadcast_to(b_d[:, None], (rows, length)))
                csum = cnt.sum(axis=1)
                pos_sum = cnt @ np.arange(lo + 1, hi + 1, dtype=float)
                total += csum[:, None] * u[None, :] + pos_sum[:, None] * v[None, :]
            else:
                cnt = gen.poisson(length * b_d)
                n_events = int(cnt.sum())
                if n_events:
                    rep_ids = np.repeat(np.arange(rows), cnt)
                    pos = gen.integers(lo + 1, hi + 1, size=n_events).astype(float)
                    pos_sum = np.bincount(rep_ids, weights=pos, minlength=rows)
                else:
                    pos_sum = np.zeros(rows)
                total += cnt[:, None] * u[None, :] + pos_sum[:, None] * v[None, :]


def _sample_aggregate_chunk(
    gen: np.random.Generator,
    lam: float,
    alpha_chunk: np.ndarray | float,
    N: int,
    n: int,
    cutoffs: np.ndarray,
    rows: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Raw aggregate sums T_m (rows x cutoffs) plus per-row sum_j (1-a_j)^-1."""
    if np.isscalar(alpha_chunk):
        alpha = float(alpha_chunk)
        d_pow = alpha ** np.arange(n + 1)
        a = np.broadcast_to(lam * N * d_pow, (rows, n + 1)).copy()
        inv_sum = np.full(rows, N / (1.0 - alpha))
        c_top = np.full(rows, lam * N * alpha**n / (1.0 - alpha))
    else:
        one_minus = 1.0 - alpha_chunk
        inv_sum = (1.0 / one_minus).sum(axis=1)
        with np.errstate(under="ignore"):
            c_top = lam * (alpha_chunk**n / one_minus).sum(axis=1)
        a = _geometric_mass_table(alpha_chunk, lam, n)

    total = np.zeros((rows, cutoffs.size))

    # single interval [0, n]: weight m at every cutoff
    cnt_top = gen.poisson(c_top)
    total += cnt_top[:, None] * cutoffs[None, :].astype(float)

    # intervals [0, j], 1 <= j <= n-1: mass a_j, weight min(j, m)
    if n >= 2:
        j_idx = np.arange(1, n)
        cnt = gen.poisson(a[:, 1:n])
        w = np.minimum(j_idx[:, None], cutoffs[None, :]).astype(float)
        total += cnt @ w

    # intervals [i, n], 1 <= i <= n: mass a_{n-i}, weight max(0, m - i + 1)
    i_idx = np.arange(1, n + 1)
    cnt = gen.poisson(a[:, n - 1 :: -1])
    w = np.maximum(0, cutoffs[None, :] - i_idx[:, None] + 1).astype(float)
    total += cnt @ w

    # interior intervals via plateau/ramp segments
    b = a[:, :-1] - a[:, 1:]
    np.clip(b, 0.0, None, out=b)
    _draw_interior(gen, b, n, cutoffs, total)
    return total, lam * inv_sum


def sample_aggregate(
    model,
    spec: AggregationSpec,
    rng: RngStream,
    return_raw: bool = False,
) -> np.ndarray:
    """Replicate samples of the centered aggregate, exact in law.

    ``model`` is an :class:`InarModel` (deterministic coefficient) or a
    :class:`RandomizedModel`.  Output has shape (replicates, len(t_grid)).
    One stream drives a whole cell; chunking over replicates is fixed, so
    results are bit-reproducible from (seed, cell) alone.
    """
    rng = as_stream(rng)
    gen = rng.generator()
    if isinstance(model, InarModel):
        lam, mixing = model.lam, None
    else:
        lam, mixing = model.lam, model.mixing

    cutoffs = spec.cutoffs
    if cutoffs.max() > spec.n:
        raise ValueError("sample_aggregate requires the grid inside (0, 1] (cutoffs <= n)")
    need_horizon = spec.centering is CenteringMode.EMPIRICAL_MEAN
    all_cut = cutoffs
    idx_n = None
    if need_horizon:
        hits = np.flatnonzero(cutoffs == spec.n)
        if hits.size:
            idx_n = int(hits[0])
        else:
            all_cut = np.append(cutoffs, spec.n)
            idx_n = all_cut.size - 1

    if spec.centering is CenteringMode.UNCONDITIONAL:
        if mixing is None:
            uncond_mean = model.stationary_mean
        else:
            uncond_mean = lam * _mean_inverse(model)

    out = np.empty((spec.replicates, cutoffs.size))
    done = 0
    while done < spec.replicates:
        rows = min(_CHUNK, spec.replicates - done)
        if mixing is None or mixing.is_degenerate:
            alpha_arg = model.alpha if mixing is None else mixing.expect(lambda x: x)
            raw, cond_center = _sample_aggregate_chunk(
                gen, lam, alpha_arg, spec.N, spec.n, all_cut, rows
            )
        else:
            alpha_chunk = np.asarray(
                mixing.sample(gen, size=rows * spec.N), dtype=float
            ).reshape(rows, spec.N)
            raw, cond_center = _sample_aggregate_chunk(
                gen, lam, alpha_chunk, spec.N, spec.n, all_cut, rows
            )
        if return_raw:
            vals = raw[:, : cutoffs.size]
        elif spec.centering is CenteringMode.CONDITIONAL:
            vals = raw[:, : cutoffs.size] - cutoffs[None, :] * cond_center[:, None]
        elif spec.centering is CenteringMode.UNCONDITIONAL:
            vals = raw[:, : cutoffs.size] - cutoffs[None, :] * (spec.N * uncond_mean)
        else:
            t_n = raw[:, idx_n]
            vals = (spec.n * raw[:, : cutoffs.size] - cutoffs[None, :] * t_n[:, None]) / spec.n
        out[done : done + rows] = vals
        done += rows
    return out


# ---------------------------------------------------------------------------
# regimes: theorem-indexed scalings, orders, limits
# ---------------------------------------------------------------------------


class IterationOrder(Enum):
    N_FIRST = "N_first"   # inner limit N -> infinity, then n
    n_FIRST = "n_first"   # inner limit n -> infinity, then N
    EITHER = "either"


@dataclass(frozen=True)
class RegimeScaling:
    """One theorem's scaling, admissible iteration order and limit law."""

    regime: str
    order: IterationOrder
    centering: CenteringMode
    scale: Callable[[int, int, float | None], float]
    beta_lo: float | None
    beta_hi: float | None
    beta_exact: float | None = None
    requires_degenerate: bool = False
    limit_builder: Callable = field(default=None, repr=False)

    def admits_beta(self, beta: float | None) -> bool:
        if self.requires_degenerate:
            return beta is None
        if beta is None:
            return False
        if self.beta_exact is not None:
            return beta == self.beta_exact
        lo_ok = self.beta_lo is None or beta > self.beta_lo
        hi_ok = self.beta_hi is None or beta < self.beta_hi
        return lo_ok and hi_ok

    def check_model(self, model) -> None:
        if self.requires_degenerate:
            if isinstance(model, InarModel):
                return
            if isinstance(model, RandomizedModel) and model.mixing.is_degenerate:
                return
            raise ValueError(f"regime {self.regime} applies to the deterministic-coefficient model")
        if not isinstance(model, RandomizedModel):
            raise ValueError(f"regime {self.regime} needs a RandomizedModel")
        if not self.admits_beta(model.mixing.beta):
            raise ValueError(
                f"mixing beta={model.mixing.beta} outside the range of regime {self.regime}"
            )

    def limit_law(self, model) -> LimitLaw:
        self.check_model(model)
        return self.limit_builder(model)


def _sigma_t33(model) -> float:
    if isinstance(model, RandomizedModel):
        model = model.conditional(model.mixing.expect(lambda x: x))
    return math.sqrt(model.lam * (1.0 + model.alpha)) / (1.0 - model.alpha)


def _limit_t33(model):
    return ScaledBM(_sigma_t33(model))


def _limit_t45(model):
    return FBM(model.mixing.beta, analytics.limit_constants(model).c_fbm)


def _limit_t46(model):
    beta = model.mixing.beta
    return SymmetricStableLine(2.0 * (1.0 + beta), analytics.limit_constants(model).K_beta)


def _limit_t47(model):
    return GaussianLine(analytics.limit_constants(model).w_var_43)


def _limit_t48(model):
    return SubordinatedLevy(model.mixing.beta, analytics.limit_constants(model).k_beta)


def _limit_t49(model):
    return ScaledBM(math.sqrt(analytics.limit_constants(model).sigma2))


def _limit_t410(model):
    beta = model.mixing.beta
    coeff = float(analytics.limit_constants(model).omega_beta(1.0).real / math.cos(
        math.pi * (1.0 + beta) / 2.0
    ))
    return SkewedStableLine(beta, coeff)


def _limit_t411(model):
    return GaussianLine(analytics.limit_constants(model).w_var_411)


def _scale_t33(N, n, beta=None):
    return 1.0 / math.sqrt(n * N)


def _scale_t45(N, n, beta=None):
    return n ** (-1.0 + beta / 2.0) * N**-0.5


def _scale_t46(N, n, beta=None):
    return (1.0 / n) * N ** (-1.0 / (2.0 * (1.0 + beta)))


def _scale_t47(N, n, beta=None):
    return (1.0 / n) / math.sqrt(N * math.log(N))


def _scale_t48(N, n, beta=None):
    return N ** (-1.0 / (1.0 + beta)) / math.sqrt(n)


def _scale_t410(N, n, beta=None):
    return (1.0 / n) * N ** (-1.0 / (1.0 + beta))


def _scale_t411(N, n, beta=None):
    return (1.0 / n) / math.sqrt(N)


REGIMES: dict[str, RegimeScaling] = {}


def _register(regime):
    REGIMES[regime.regime] = regime


_register(RegimeScaling(
    "t33", IterationOrder.EITHER, CenteringMode.UNCONDITIONAL, _scale_t33,
    None, None, requires_degenerate=True, limit_builder=_limit_t33))
_register(RegimeScaling(
    "t45", IterationOrder.N_FIRST, CenteringMode.CONDITIONAL, _scale_t45,
    0.0, 1.0, limit_builder=_limit_t45))
_register(RegimeScaling(
    "t46", IterationOrder.N_FIRST, CenteringMode.CONDITIONAL, _scale_t46,
    -1.0, 0.0, limit_builder=_limit_t46))
_register(RegimeScaling(
    "t47", IterationOrder.N_FIRST, CenteringMode.CONDITIONAL, _scale_t47,
    None, None, beta_exact=0.0, limit_builder=_limit_t47))
_register(RegimeScaling(
    "t48", IterationOrder.n_FIRST, CenteringMode.CONDITIONAL, _scale_t48,
    -1.0, 1.0, limit_builder=_limit_t48))
_register(RegimeScaling(
    "t49", IterationOrder.EITHER, CenteringMode.CONDITIONAL, _scale_t33,
    1.0, None, limit_builder=_limit_t49))
_register(RegimeScaling(
    "t410", IterationOrder.EITHER, CenteringMode.UNCONDITIONAL, _scale_t410,
    0.0, 1.0, limit_builder=_limit_t410))
_register(RegimeScaling(
    "t411", IterationOrder.EITHER, CenteringMode.UNCONDITIONAL, _scale_t411,
    1.0, None, limit_builder=_limit_t411))
_register(RegimeScaling(
    "c412a", IterationOrder.N_FIRST, CenteringMode.EMPIRICAL_MEAN, _scale_t45,
    0.0, 1.0, limit_builder=lambda m: Bridge(_limit_t45(m))))
_register(RegimeScaling(
    "c412b", IterationOrder.n_FIRST, CenteringMode.EMPIRICAL_MEAN, _scale_t48,
    -1.0, 1.0, limit_builder=lambda m: Bridge(_limit_t48(m))))
_register(RegimeScaling(
    "c412c", IterationOrder.EITHER, CenteringMode.EMPIRICAL_MEAN, _scale_t33,
    1.0, None, limit_builder=lambda m: Bridge(_limit_t49(m))))


def apply_scaling(
    regime: RegimeScaling, N: int, n: int, raw: np.ndarray, beta: float | None = None
) -> np.ndarray:
    """Multiply raw partial-sum samples by the regime's scaling factor."""
    if N < 1 or n < 1:
        raise ValueError("N and n must be positive")
    if beta is not None and not regime.admits_beta(beta):
        raise ValueError(f"beta={beta} outside the range of regime {regime.regime}")
    return np.asarray(raw) * regime.scale(N, n, beta)


# ---------------------------------------------------------------------------
# iterated experiments
# ---------------------------------------------------------------------------


@dataclass
class ExperimentCell:
    N: int
    n: int
    samples: np.ndarray  # scaled, (replicates x len(t_grid))
    drift_sigma: float | None = None  # |std(t_max) - previous| / SE, inner ladder


_DEFAULT_BUDGET_CAP = 10**11


def iterated_experiment(
    model,
    regime: RegimeScaling,
    N_ladder: Sequence[int],
    n_ladder: Sequence[int],
    spec_t_grid: Sequence[float],
    replicates: int,
    rng: RngStream,
    order: IterationOrder | None = None,
    budget_cap: int = _DEFAULT_BUDGET_CAP,
) -> list[ExperimentCell]:
    """Run the regime's scaled statistic over a ladder of (N, n) cells.

    For ``N_FIRST`` the outer loop fixes n and grows N (the inner limit of
    the theorem), and vice versa for ``n_FIRST``; the last cell is the
    largest budget.  Each cell's stream is derived from its (N, n) key, so
    any cell is reproducible in isolation from (seed, cell) alone.
    """
    regime.check_model(model)
    if not N_ladder or not n_ladder:
        raise ValueError("ladders must be nonempty")
    N_lad = sorted(int(x) for x in N_ladder)
    n_lad = sorted(int(x) for x in n_ladder)
    if order is None:
        order = regime.order if regime.order is not IterationOrder.EITHER else IterationOrder.N_FIRST
    if regime.order is not IterationOrder.EITHER and order is not regime.order:
        raise ValueError(
            f"regime {regime.regime} admits only iteration order {regime.order.value}"
        )
    for N in N_lad:
        for n in n_lad:
            if N * n * replicates > budget_cap:
                raise ValueError(
                    f"cell N={N}, n={n}, R={replicates} exceeds the budget cap {budget_cap:g}"
                )
    beta = None if isinstance(model, InarModel) else model.mixing.beta
    rng = as_stream(rng)

    if order is IterationOrder.N_FIRST:
        pairs = [(N, n) for n in n_lad for N in N_lad]
        inner_len = len(N_lad)
    else:
        pairs = [(N, n) for N in N_lad for n in n_lad]
        inner_len = len(n_lad)

    cells: list[ExperimentCell] = []
    prev_std = None
    for idx, (N, n) in enumerate(pairs):
        cell_rng = rng.substream(100_003 * N + 17 * n + 1)
        spec = AggregationSpec(N=N, n=n, t_grid=tuple(spec_t_grid),
                               centering=regime.centering, replicates=replicates)
        raw = sample_aggregate(model, spec, cell_rng)
        scaled = raw * regime.scale(N, n, beta)
        drift = None
        if idx % inner_len != 0 and prev_std is not None:
            last = scaled[:, -1]
            se = float(last.std(ddof=1)) / math.sqrt(2.0 * max(len(last) - 1, 1))
            drift = abs(float(last.std(ddof=1)) - prev_std) / se if se > 0 else None
        prev_std = float(scaled[:, -1].std(ddof=1))
        cells.append(ExperimentCell(N=N, n=n, samples=scaled, drift_sigma=drift))
    return cells
