"""Portable seeded random numbers.

Everything random in the package (instance coefficients, sampler chains,
RMQC shuffles, benchmark repeat seeds) is driven by SplitMix64 (Steele,
Lea & Flood 2014): a 64-bit state advanced by the golden-ratio increment
``0x9E3779B97F4A7C15`` and passed through a fixed avalanche mix.  The
generator is a few lines of integer arithmetic, so streams are
bit-reproducible across platforms and numpy versions.

Because the k-th output of a SplitMix64 stream is ``mix64(seed + k*GAMMA)``,
any draw can also be computed directly from its counter.  The sampler uses
that property (:func:`counter_u64`) to give every read its own stream
without any sequential state, which keeps results independent of batching.

Derived conversions:

* unit doubles use the top 53 bits: ``(x >> 11) * 2**-53`` in ``[0, 1)``;
* bounded integers use rejection sampling (no modulo bias);
* standard normals use the Box-Muller cosine branch, consuming two draws.
"""

from __future__ import annotations

import math
from typing import MutableSequence, TypeVar

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO_POW_M53 = 2.0**-53

T = TypeVar("T")


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *path: int) -> int:
    """Fold integer labels into ``seed`` to get an independent child seed.

    ``derive_seed(s, 3, 1)`` is the seed for e.g. instance 3, repeat 1.
    """
    out = mix64(seed)
    for label in path:
        out = mix64(out ^ mix64((label + 1) * GAMMA))
    return out


class SplitMix64:
    """Sequential SplitMix64 stream."""

    def __init__(self, seed: int):
        if seed < 0 or seed > MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.state = seed

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * _TWO_POW_M53

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (MASK64 + 1) - ((MASK64 + 1) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def sign(self) -> int:
        """-1 or +1 with equal probability (top bit of one draw)."""
        return 1 if self.next_u64() >> 63 else -1

    def uniform_symmetric(self) -> float:
        """Uniform double in [-1, 1)."""
        return 2.0 * self.random() - 1.0

    def normal(self) -> float:
        # 1 - u keeps the log argument in (0, 1]
        u1 = 1.0 - self.random()
        u2 = self.random()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def shuffle(self, seq: MutableSequence[T]) -> None:
        """In-place Fisher-Yates shuffle (Durstenfeld, descending index)."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]


def stream_key(seed: int, stream: int) -> int:
    """Seed of the SplitMix64 stream number ``stream`` under ``seed``."""
    return derive_seed(seed, stream)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_MIX1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def counter_u64(keys: np.ndarray, counters: np.ndarray) -> np.ndarray:
    """Draw number ``counters`` (0-based) of each stream seeded by ``keys``.

    Broadcasts ``keys`` against ``counters``; the result equals what
    ``SplitMix64(key)`` would return on its ``counter + 1``-th call.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    counters = np.asarray(counters, dtype=np.uint64)
    state = keys + (counters + np.uint64(1)) * np.uint64(GAMMA)
    return _mix64_array(state)


def to_unit(x: np.ndarray) -> np.ndarray:
    """Map uint64 draws to doubles in [0, 1)."""
    return (x >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53
