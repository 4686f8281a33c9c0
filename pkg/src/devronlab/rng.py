"""Seeded sampling helpers.

All randomness flows through :class:`random.Random` (Mersenne Twister
MT19937, seeded from a Python int), which produces the same stream on every
platform for the same integer seed.
"""
from __future__ import annotations

import random
from fractions import Fraction

SEED_LIMIT = 2**64


def make_rng(seed: int) -> random.Random:
    if not 0 <= seed < SEED_LIMIT:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return random.Random(seed)


def trial_seeds(seed: int, count: int) -> list[int]:
    """Independent per-trial seeds derived deterministically from ``seed``."""
    master = make_rng(seed)
    return [master.getrandbits(64) for _ in range(count)]


def rational(rng: random.Random, bound: int = 9, nonzero: bool = False) -> Fraction:
    """Uniform draw from {p/q : |p| <= bound, 1 <= q <= bound}."""
    while True:
        value = Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
        if value != 0 or not nonzero:
            return value


def rational_avoiding(rng: random.Random, forbidden, bound: int = 9) -> Fraction:
    while True:
        value = rational(rng, bound)
        if value not in forbidden:
            return value
