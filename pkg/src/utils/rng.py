"""Deterministic random streams.

Every consumer derives its generator from ``(seed, stream)`` so that results do
not depend on the order in which streams are drawn or on how work is split.
"""
from typing import List

import numpy as np


def child_rng(seed: int, stream: int) -> np.random.Generator:
    """A Generator deterministically derived from a base seed and a stream index."""
    if seed < 0 or stream < 0:
        raise ValueError(f"seed and stream must be non-negative, got seed={seed}, stream={stream}")
    return np.random.default_rng(np.random.SeedSequence([seed, stream]))


def partial_fisher_yates(rng: np.random.Generator, population: int, k: int) -> List[int]:
    """Draw k distinct integers from range(population) by a partial Fisher-Yates shuffle.

    Only the touched positions are materialized, so the cost is O(k) regardless
    of the population size. The result is returned sorted.
    """
    if not 0 <= k <= population:
        raise ValueError(f"cannot draw {k} items from a population of {population}")
    swapped = {}
    chosen = []
    for i in range(k):
        j = int(rng.integers(i, population))
        chosen.append(swapped.get(j, j))
        swapped[j] = swapped.get(i, i)
    return sorted(chosen)
