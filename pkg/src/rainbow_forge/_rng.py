"""Seeded random streams.

Every randomized routine draws from ``numpy.random.Generator`` over the
counter-based Philox4x64-10 bit generator. Seeds are reduced to 64 bits.
"""
from __future__ import annotations

import numpy as np

RNG_NAME = "numpy.random.Generator(Philox4x64-10)"
SEED_MASK = (1 << 64) - 1


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        return np.random.Generator(np.random.Philox())
    return np.random.Generator(np.random.Philox(int(seed) & SEED_MASK))


def rng_info() -> dict:
    return {"generator": RNG_NAME, "numpy": np.__version__}
