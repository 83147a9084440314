"""Exact simulation of (randomized) INAR(1) trajectories.

All draws are exact: Poisson sampling uses numpy's Generator (inversion for
small means, transformed rejection above -- no normal approximation), and
thinning is a single binomial draw, which has the same law as summing
Bernoulli survivors but costs O(1) per step.

Paths start from the stationary law Poisson(lam / (1 - alpha)), so every
finite window is strictly stationary, conditionally on alpha.
"""

from __future__ import annotations

import numpy as np

from .models import InarModel, MixingLaw, RandomizedModel
from .rng import RngStream, as_stream

__all__ = [
    "sample_poisson",
    "binomial_thin",
    "sample_mixing",
    "simulate_inar_path",
    "simulate_inar_paths",
    "simulate_randomized_ensemble",
    "simulate_stationary_prefix",
]


def sample_poisson(mean: float, rng: RngStream, size: int | None = None):
    """Poisson(mean) draw(s), deterministic in the stream key."""
    if not mean > 0:
        raise ValueError(f"mean must be positive, got {mean}")
    return as_stream(rng).generator().poisson(mean, size=size)


def binomial_thin(x, alpha: float, rng: RngStream, size: int | None = None):
    """Binomial thinning alpha o x: number of survivors among x individuals."""
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    x = np.asarray(x)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    return as_stream(rng).generator().binomial(x, alpha, size=size)


def sample_mixing(mixing: MixingLaw, rng: RngStream, size: int | None = None):
    """Draw thinning coefficient(s) from the mixing law.

    The Beta variant is an exact Beta(a+1, beta+1) draw; the general-density
    variant is rejection sampled against a Beta(1, beta+1) proposal with the
    declared envelope; a degenerate law consumes no randomness.
    """
    return mixing.sample(as_stream(rng).generator(), size=size)


def _paths_given_alpha(
    lam: float,
    alpha,
    length: int,
    gen: np.random.Generator,
    n_paths: int,
) -> np.ndarray:
    """Stationary paths X_0..X_length; alpha may be scalar or per-path vector.

    Draw order is fixed (X_0 first, then thin/innovate per step) so a copy is
    bit-reproducible from its stream regardless of the caller.
    """
    out = np.empty((n_paths, length + 1), dtype=np.int64)
    mean0 = lam / (1.0 - np.asarray(alpha, dtype=float))
    out[:, 0] = gen.poisson(np.broadcast_to(mean0, (n_paths,)))
    for k in range(1, length + 1):
        out[:, k] = gen.binomial(out[:, k - 1], alpha) + gen.poisson(lam, size=n_paths)
    return out


def simulate_inar_path(model: InarModel, length: int, rng: RngStream) -> np.ndarray:
    """One stationary trajectory X_0..X_length of the INAR(1) process."""
    if length < 1:
        raise ValueError("length must be at least 1")
    gen = as_stream(rng).generator()
    return _paths_given_alpha(model.lam, model.alpha, length, gen, n_paths=1)[0]


def simulate_inar_paths(
    model: InarModel, n_paths: int, length: int, rng: RngStream
) -> np.ndarray:
    """n_paths independent stationary trajectories, shape (n_paths, length+1).

    All paths share one stream, consumed in a fixed vectorized order; use
    substreams when per-path reproducibility is required.
    """
    if length < 1 or n_paths < 1:
        raise ValueError("n_paths and length must be at least 1")
    gen = as_stream(rng).generator()
    return _paths_given_alpha(model.lam, model.alpha, length, gen, n_paths=n_paths)


def simulate_randomized_ensemble(
    rmodel: RandomizedModel, N: int, length: int, rng: RngStream
) -> tuple[np.ndarray, np.ndarray]:
    """N independent copies of the randomized process.

    Copy j consumes substream j of ``rng``: first its own alpha_j, then the
    path. Results are therefore identical for any execution order or worker
    count, and for a degenerate mixing the first copy reproduces
    ``simulate_inar_path`` on the same stream bit for bit.

    Returns (alphas, paths) with shapes (N,) and (N, length+1).
    """
    if N < 1 or length < 1:
        raise ValueError("N and length must be at least 1")
    rng = as_stream(rng)
    alphas = np.empty(N)
    paths = np.empty((N, length + 1), dtype=np.int64)
    for j in range(N):
        gen = rng.substream(j).generator()
        alphas[j] = rmodel.mixing.sample(gen)
        paths[j] = _paths_given_alpha(rmodel.lam, alphas[j], length, gen, n_paths=1)[0]
    return alphas, paths


def simulate_stationary_prefix(
    rmodel: RandomizedModel, n_copies: int, length: int, rng: RngStream
) -> tuple[np.ndarray, np.ndarray]:
    """Bulk sampler for short prefixes (X_0..X_length) of many copies.

    Unlike :func:`simulate_randomized_ensemble` this vectorizes every draw
    across copies on a single stream, which is what Monte Carlo checks with
    millions of copies need; the joint law per copy is identical.
    """
    if n_copies < 1 or length < 1:
        raise ValueError("n_copies and length must be at least 1")
    gen = as_stream(rng).generator()
    alphas = np.asarray(rmodel.mixing.sample(gen, size=n_copies), dtype=float)
    paths = _paths_given_alpha(rmodel.lam, alphas, length, gen, n_paths=n_copies)
    return alphas, paths
