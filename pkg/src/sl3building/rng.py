"""Deterministic stream splitting for reproducible experiments.

All randomness flows through Python's Mersenne Twister seeded by a splitmix64
derivation of (seed, index...) so that independent trials get independent,
reproducible streams: derive(seed, k) feeds each trial k its own generator
and results are bit-identical across runs and platforms.
"""

from __future__ import annotations

import random

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x):
    """One splitmix64 step; the generator named in the output records."""
    x = (x + _GAMMA) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def derive_seed(seed, *indices):
    """64-bit stream seed for a (seed, index...) path."""
    x = seed & _MASK
    x = splitmix64(x)
    for k in indices:
        x = splitmix64(x ^ (k & _MASK))
    return x


def make_rng(seed, *indices):
    return random.Random(derive_seed(seed, *indices))
