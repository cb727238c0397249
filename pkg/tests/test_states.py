import math

import numpy as np
import pytest

from src.core.errors import DimensionMismatch, InvalidCount, InvalidMarkedSet, LengthMismatch, NotNormalized
from src.core.partition import partition_stats
from src.core.states import (
    basis_state,
    check_dimensions,
    compensated_mean,
    global_mean,
    new_marked_set,
    new_mixed_ensemble,
    new_pure_state,
    uniform_state,
)


def test_new_pure_state_accepts_uniform():
    state = new_pure_state(2, [0.5, 0.5, 0.5, 0.5])
    assert state.n == 2
    assert state.n_total == 4
    np.testing.assert_allclose(state.probabilities(), 0.25)


def test_new_pure_state_accepts_basis_vector():
    state = new_pure_state(1, [1, 0])
    assert state.amplitudes[0] == 1.0


def test_new_pure_state_rejects_unnormalized():
    with pytest.raises(NotNormalized):
        new_pure_state(1, [0.9, 0])


def test_new_pure_state_rejects_wrong_length():
    with pytest.raises(LengthMismatch):
        new_pure_state(2, [1, 0])


def test_new_pure_state_norm_tolerance():
    scale = math.sqrt(1.0 + 5e-9)
    state = new_pure_state(1, [scale, 0])
    # stored exactly as given, never rescaled
    assert state.amplitudes[0] == scale
    with pytest.raises(NotNormalized):
        new_pure_state(1, [math.sqrt(1.0 + 1e-7), 0])


def test_new_pure_state_rejects_bad_qubit_count():
    with pytest.raises(InvalidCount):
        new_pure_state(0, [1])


def test_amplitudes_are_read_only_copies():
    source = np.array([0.5, 0.5, 0.5, 0.5], dtype=complex)
    state = new_pure_state(2, source)
    source[0] = 7.0
    assert state.amplitudes[0] == 0.5
    with pytest.raises(ValueError):
        state.amplitudes[0] = 1.0


def test_new_pure_state_accepts_generator():
    state = new_pure_state(1, (x for x in (0.0, 1j)))
    assert state.amplitudes[1] == 1j


def test_uniform_state():
    np.testing.assert_allclose(uniform_state(1).amplitudes, [1 / math.sqrt(2)] * 2)
    np.testing.assert_allclose(uniform_state(2).amplitudes, [0.5] * 4)


def test_global_mean_of_uniform_state():
    assert abs(global_mean(uniform_state(10)) - 1.0 / 32.0) <= 1e-15
    for n in (1, 3, 6):
        assert abs(global_mean(uniform_state(n)) - 1.0 / math.sqrt(1 << n)) <= 1e-15


def test_global_mean_antisymmetric():
    state = new_pure_state(1, [1 / math.sqrt(2), -1 / math.sqrt(2)])
    assert global_mean(state) == 0


def test_global_mean_matches_exact_summation(random_state):
    state = random_state(8)
    values = state.amplitudes
    exact_re = math.fsum(values.real) / values.size
    exact_im = math.fsum(values.imag) / values.size
    assert abs(global_mean(state) - complex(exact_re, exact_im)) <= 1e-15


def test_compensated_mean_constant_vector():
    values = np.full(1000, 0.1 + 0.2j)
    assert abs(compensated_mean(values) - (0.1 + 0.2j)) <= 1e-15


def test_basis_state():
    state = basis_state(2, 3)
    np.testing.assert_array_equal(state.amplitudes, [0, 0, 0, 1])
    with pytest.raises(InvalidCount):
        basis_state(2, 4)


def test_new_marked_set_sorts():
    marked = new_marked_set(3, [5, 1, 3])
    assert marked.indices == (1, 3, 5)
    assert marked.r == 3
    assert not marked.is_full
    assert marked.mask.tolist() == [False, True, False, True, False, True, False, False]


@pytest.mark.parametrize("indices", [[], [1, 1], [4], [-1]])
def test_new_marked_set_rejects(indices):
    with pytest.raises(InvalidMarkedSet):
        new_marked_set(2, indices)


def test_full_marked_set():
    assert new_marked_set(1, [1, 0]).is_full


def test_check_dimensions():
    with pytest.raises(DimensionMismatch):
        check_dimensions(uniform_state(2), new_marked_set(3, [0]))


def test_partition_stats_uniform():
    stats = partition_stats(uniform_state(2), new_marked_set(2, [3]))
    assert stats.p0 == pytest.approx(0.25, abs=1e-15)
    assert stats.abar_m == pytest.approx(0.5, abs=1e-15)
    assert stats.abar_u == pytest.approx(0.5, abs=1e-15)
    assert stats.abar == pytest.approx(0.5, abs=1e-15)


def test_partition_stats_basis_state():
    stats = partition_stats(basis_state(2, 0), new_marked_set(2, [0]))
    assert stats.p0 == 1.0
    assert stats.abar_m == 1.0
    assert stats.abar_u == 0.0


def test_partition_stats_matches_resummation(random_state):
    state = random_state(3)
    stats = partition_stats(state, new_marked_set(3, [1, 2]))
    a = state.amplitudes
    assert abs(stats.p0 - (abs(a[1]) ** 2 + abs(a[2]) ** 2)) <= 1e-15
    assert abs(stats.abar_m - (a[1] + a[2]) / 2) <= 1e-15
    rest = np.delete(a, [1, 2])
    assert abs(stats.abar_u - complex(sum(rest)) / 6) <= 1e-15


def test_partition_stats_fully_marked(random_state):
    state = random_state(2)
    stats = partition_stats(state, new_marked_set(2, range(4)))
    assert stats.fully_marked
    assert stats.abar_u == 0
    assert stats.p0 == pytest.approx(1.0, abs=1e-12)


def test_partition_stats_permutation_covariant(rng, random_state):
    state = random_state(5)
    marked = new_marked_set(5, [0, 3, 17, 30])
    perm = rng.permutation(32)
    relabeled = np.empty_like(state.amplitudes)
    relabeled[perm] = state.amplitudes
    moved = partition_stats(new_pure_state(5, relabeled), new_marked_set(5, perm[list(marked.indices)].tolist()))
    original = partition_stats(state, marked)
    assert moved.p0 == pytest.approx(original.p0, abs=1e-15)
    assert abs(moved.abar_m - original.abar_m) <= 1e-15
    assert abs(moved.abar_u - original.abar_u) <= 1e-15


def test_new_mixed_ensemble_validation():
    eta = uniform_state(1)
    ens = new_mixed_ensemble(1, [(0.25, eta), (0.75, basis_state(1, 0))])
    np.testing.assert_allclose(ens.weights, [0.25, 0.75])
    with pytest.raises(InvalidCount):
        new_mixed_ensemble(1, [])
    with pytest.raises(NotNormalized):
        new_mixed_ensemble(1, [(0.5, eta), (0.4, eta)])
    with pytest.raises(NotNormalized):
        new_mixed_ensemble(1, [(1.5, eta), (-0.5, eta)])
    with pytest.raises(DimensionMismatch):
        new_mixed_ensemble(2, [(1.0, eta)])
