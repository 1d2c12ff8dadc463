"""Counter-mode pseudorandom primitives shared by the codec and the harness.

Everything downstream that needs reproducible randomness builds on a single
64-bit mixing function (the splitmix64 finalizer).  Codeword bits are pure
functions of ``(seed, message, bin, slot)``; per-trial noise streams are
``numpy`` generators seeded from the same chain.  The scalar and vectorized
paths are bit-identical, which the test suite pins down.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit integer."""
    z = x & MASK64
    z = ((z ^ (z >> 30)) * _C1) & MASK64
    z = ((z ^ (z >> 27)) * _C2) & MASK64
    return z ^ (z >> 31)


def mix64_array(x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`mix64` over a uint64 array (wraparound arithmetic)."""
    z = x.astype(np.uint64, copy=True)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_C1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_C2)
    return z ^ (z >> np.uint64(31))


def derive(seed: int, *parts: int) -> int:
    """Hash-chain a seed with integer labels into a fresh 64-bit value.

    ``derive(s, a, b)`` is the codeword/stream key for label path (a, b).
    Labels are offset by the golden-ratio constant so that small consecutive
    integers land far apart in the input space.
    """
    h = mix64(seed)
    for p in parts:
        h = mix64(h ^ ((p + GOLDEN) & MASK64))
    return h


def bernoulli_threshold(p: float) -> int:
    """Threshold t such that ``mix64(...) < t`` has probability p (up to 2^-64)."""
    if p <= 0.0:
        return 0
    if p >= 1.0:
        return 1 << 64
    return int(p * (1 << 64))


def position_keys(positions: np.ndarray) -> np.ndarray:
    """Precomputed per-slot xor keys for the codeword bit function."""
    return (positions.astype(np.uint64) + np.uint64(GOLDEN)).astype(np.uint64)


def spawn_generator(seed: int, *parts: int) -> np.random.Generator:
    """A numpy Generator whose stream is keyed by the derive() chain."""
    return np.random.default_rng(derive(seed, *parts))
