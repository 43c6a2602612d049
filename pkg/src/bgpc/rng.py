"""Seeded random streams.

Every random draw in the package comes from a Philox (counter-based) bit
generator keyed through ``numpy.random.SeedSequence``.  A stream is named by
the user seed plus a tuple of non-negative integers (trial index, cell
coordinates, ...), so a given trial draws the same numbers no matter in which
order or on which worker it runs.
"""
from __future__ import annotations

import numpy as np

RNG_NAME = "numpy-philox4x64-seedsequence"


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    if seed < 0 or any(s < 0 for s in stream):
        raise ValueError("seed and stream indices must be non-negative")
    ss = np.random.SeedSequence([int(seed), *map(int, stream)])
    return np.random.Generator(np.random.Philox(ss))


def gaussian(rng: np.random.Generator, shape, complex_: bool = False) -> np.ndarray:
    """iid N(0, 1) draws; complex draws have independent N(0, 1/2) parts."""
    if complex_:
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    return rng.standard_normal(shape)


def nonvanishing_gaussian(rng: np.random.Generator, size: int, floor: float = 1e-3,
                          complex_: bool = False) -> np.ndarray:
    """Gaussian vector with every entry redrawn until its modulus is at least ``floor``."""
    out = gaussian(rng, size, complex_)
    small = np.abs(out) < floor
    while small.any():
        out[small] = gaussian(rng, int(small.sum()), complex_)
        small = np.abs(out) < floor
    return out
