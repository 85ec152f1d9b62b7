"""Seed derivation and generator construction.

All randomness in the package flows through counter-based Philox streams so
that results are reproducible from a single master seed, regardless of how
work is split into replications, starts, or restarts.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(master: int, *parts: int) -> int:
    """Derive a child seed as a pure function of (master, *parts).

    Uses numpy's SeedSequence entropy hashing, which is stable across
    platforms and numpy versions.
    """
    entropy = [int(master) & _MASK64] + [int(p) & _MASK64 for p in parts]
    ss = np.random.SeedSequence(entropy)
    return int(ss.generate_state(1, np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    """Philox generator keyed directly by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & _MASK64))
