"""Seeded, splittable random streams.

Every sampling routine takes an explicit integer seed. Sub-streams are
keyed by integer paths, so ``stream(seed, i)`` for instance ``i`` does not
depend on how many other instances were drawn or in what order.
"""
from __future__ import annotations

import numpy as np


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Return a PCG64 generator for the path ``(seed, *keys)``."""
    if seed < 0 or any(k < 0 for k in keys):
        raise ValueError("seed and stream keys must be non-negative integers")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, keys)])))
