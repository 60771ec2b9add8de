"""Deterministic random sampling shared by pool splitting and example selection.

All draws come from `random.Random(seed).random()`. CPython guarantees that
`random()` produces the same sequence for the same seed across versions, which
makes every sample reproducible from its seed alone.
"""

from __future__ import annotations

import random


def sample_indices(population: int, k: int, seed: int) -> list[int]:
    """k distinct indices drawn uniformly from range(population).

    Partial Fisher-Yates over an index array, driven only by random() draws.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > population:
        raise ValueError(f"cannot sample {k} from population of {population}")
    rng = random.Random(seed)
    indices = list(range(population))
    for i in range(k):
        j = i + int(rng.random() * (population - i))
        indices[i], indices[j] = indices[j], indices[i]
    return indices[:k]


def mix_seed(seed: int, index: int) -> int:
    """Derive a per-item subseed from a run seed and an item index.

    Golden-ratio multiplication spreads consecutive indices across the 64-bit
    space so neighboring items get unrelated streams.
    """
    return (seed ^ ((index + 1) * 0x9E3779B97F4A7C15)) & 0xFFFFFFFFFFFFFFFF
