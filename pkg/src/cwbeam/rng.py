"""Deterministic RNG substreams.

Monte Carlo work is keyed by (seed, index...) so every sample draws from an
independent substream; results are reproducible bit-for-bit regardless of
scheduling or chunking.
"""

from __future__ import annotations

import numpy as np


def substream(seed: int, *key: int) -> np.random.Generator:
    """Generator for one substream of a 64-bit master seed."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key)))


def child_seeds(seed: int, n: int) -> list:
    """n deterministic 64-bit child seeds of a master seed."""
    state = np.random.SeedSequence(entropy=int(seed)).generate_state(n, dtype=np.uint64)
    return [int(s) for s in state]
