"""Deterministic child-seed derivation for parallel disorder sweeps.

Child seeds come from the SplitMix64 finalizer applied to
``master + (stream + 1) * 0x9E3779B97F4A7C15 (mod 2**64)``. The golden-ratio
increment is odd, so for a fixed master the map from stream index to the
pre-image is a bijection mod 2**64, and the finalizer is itself a bijection;
hence the child seed is injective in the stream index. Only 64-bit integer
arithmetic is used, so results agree on every platform.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(x: int) -> int:
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & _MASK
    return x ^ (x >> 31)


def seed_stream(master_seed: int, realization_id: int) -> int:
    """Child seed for ``realization_id`` under ``master_seed`` (both taken mod 2**64)."""
    x = (int(master_seed) + (int(realization_id) + 1) * _GOLDEN) & _MASK
    return _mix64(x)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK))
