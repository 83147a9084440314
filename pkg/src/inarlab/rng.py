"""Counter-based random number streams.

Every stochastic routine in the package is keyed by an :class:`RngStream`:
a ``(seed, stream_id)`` pair that deterministically names a PCG64 stream.
Re-creating a generator from the same pair replays the same draws, no matter
how many other streams were consumed in between, which is what makes ensemble
and experiment cells reproducible under any scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
# splitmix64 finalizer constants
_MIX_MULT_1 = 0xBF58476D1CE4E5B9
_MIX_MULT_2 = 0x94D049BB133111EB
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    """splitmix64 finalizer; bijective on 64-bit ints."""
    x &= _MASK64
    x ^= x >> 30
    x = (x * _MIX_MULT_1) & _MASK64
    x ^= x >> 27
    x = (x * _MIX_MULT_2) & _MASK64
    x ^= x >> 31
    return x


@dataclass(frozen=True)
class RngStream:
    """Immutable key naming one random stream.

    ``substream(k)`` derives a child key by hashing ``k`` into the counter,
    so substreams taken in any order (or in parallel) never collide for the
    structured, small integer keys used throughout the package.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.seed <= _MASK64):
            raise ValueError("seed must fit in 64 bits")
        if not (0 <= self.stream_id <= _MASK64):
            raise ValueError("stream_id must fit in 64 bits")

    def substream(self, key: int) -> "RngStream":
        """Child stream ``key``; ``substream(0)`` is the stream itself."""
        if key == 0:
            return self
        child = _mix64((self.stream_id + _GOLDEN * key) & _MASK64)
        return RngStream(self.seed, child)

    def generator(self) -> np.random.Generator:
        """Fresh PCG64 generator positioned at the start of this stream."""
        ss = np.random.SeedSequence([self.seed, self.stream_id])
        return np.random.Generator(np.random.PCG64(ss))


def as_stream(rng: "RngStream | int") -> RngStream:
    """Coerce a bare seed to an RngStream; pass streams through."""
    if isinstance(rng, RngStream):
        return rng
    return RngStream(int(rng))
