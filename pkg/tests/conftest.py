"""Shared fixtures: seeded generator, random states and marked sets."""
import math

import numpy as np
import pytest

from src.core.states import new_marked_set, new_pure_state

SQRT_HALF = 1.0 / math.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_state(rng):
    """Factory for normalized random states; ``real=True`` gives real amplitudes."""

    def make(n, real=False):
        size = 1 << n
        values = rng.normal(size=size)
        if not real:
            values = values + 1j * rng.normal(size=size)
        return new_pure_state(n, values / np.linalg.norm(values))

    return make


@pytest.fixture
def random_marked(rng):
    def make(n, r):
        return new_marked_set(n, rng.choice(1 << n, size=r, replace=False).tolist())

    return make


@pytest.fixture
def perpendicular_state():
    """(0, 1/sqrt2, -1/sqrt2, 0): zero marked and unmarked means for marked={0}."""
    return new_pure_state(2, [0.0, SQRT_HALF, -SQRT_HALF, 0.0])
