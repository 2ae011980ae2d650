"""Deterministic 64-bit PRNG shared by every component.

The generator is splitmix64 over a single uint64 cell. Both engine cores
(compiled and pure Python) advance the same cell with identical arithmetic,
so whole-game transcripts are bit-for-bit reproducible across backends.
Seeds are derived with `derive_seed`, which is stable across processes and
platforms (unlike the builtin `hash`).
"""

from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_INV_2_53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    z &= MASK64
    z ^= z >> 30
    z = (z * _MIX1) & MASK64
    z ^= z >> 27
    z = (z * _MIX2) & MASK64
    z ^= z >> 31
    return z


def derive_seed(*parts: int) -> int:
    """Fold integers into one 64-bit seed, order-sensitively."""
    h = 0x243F6A8885A308D3
    for p in parts:
        h = (h + _GAMMA) & MASK64
        h = mix64(h ^ mix64(p & MASK64))
    return h


class Rng:
    """splitmix64 stream.

    The state lives in a one-cell uint64 ndarray so compiled kernels can
    advance the identical stream in place.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = np.array([mix64(seed & MASK64)], dtype=np.uint64)

    def u64(self) -> int:
        s = (int(self.state[0]) + _GAMMA) & MASK64
        self.state[0] = s
        return mix64(s)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n). 32x32 multiply-shift, n < 2**32."""
        return ((self.u64() >> 32) * n) >> 32

    def uniform(self) -> float:
        return (self.u64() >> 11) * _INV_2_53

    def gauss(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        # Box-Muller without caching, so the stream position stays
        # a pure function of the number of draws.
        u1 = ((self.u64() >> 11) + 1) * _INV_2_53
        u2 = (self.u64() >> 11) * _INV_2_53
        return mu + sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def chance(self, p: float) -> bool:
        return self.uniform() < p

    def shuffle(self, seq: list) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def spawn(self, *parts: int) -> "Rng":
        """Child stream keyed off the current state and extra labels."""
        return Rng(derive_seed(int(self.state[0]), *parts))
