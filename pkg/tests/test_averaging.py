import math

import numpy as np
import pytest

from src.core.errors import BudgetExceeded, InvalidCount
from src.core.states import basis_state, new_pure_state, uniform_state
from src.engine.algebraic import optimal_iterations, rotation_angle
from src.engine.averaging import (
    AveragingMethod,
    average_success_closed,
    average_success_exact,
    average_success_from_moments,
    average_success_mc,
    max_success,
    moment_averages,
    sample_marked_set,
)

ZERO_MEAN = new_pure_state(2, [0.5, -0.5, 0.5, -0.5])


def test_exact_average_textbook():
    estimate = average_success_exact(uniform_state(2), 1, 1)
    assert estimate.value == pytest.approx(1.0, abs=1e-12)
    assert estimate.samples == 4
    assert estimate.std_error == 0.0
    assert estimate.method is AveragingMethod.ENUMERATION


def test_exact_average_all_marked(random_state):
    for t in (0, 1, 5):
        assert average_success_exact(random_state(3), 8, t).value == pytest.approx(1.0, abs=1e-12)


def test_exact_average_at_zero_is_r_over_n(random_state):
    state = random_state(4)
    for r in (1, 2, 5):
        assert average_success_exact(state, r, 0).value == pytest.approx(r / 16, abs=1e-12)


def test_exact_average_budget(random_state):
    with pytest.raises(BudgetExceeded):
        average_success_exact(random_state(6), 5, 1, budget=1000)


@pytest.mark.parametrize("r", [0, 17])
def test_exact_average_rejects_r(random_state, r):
    with pytest.raises(InvalidCount):
        average_success_exact(random_state(4), r, 1)


def test_monte_carlo_on_uniform_state_is_exact():
    eta = uniform_state(2)
    for t in (0, 1, 2, 7):
        for seed in (0, 99):
            estimate = average_success_mc(eta, 1, t, samples=50, seed=seed)
            assert estimate.value == average_success_exact(eta, 1, t).value
            assert estimate.std_error == 0.0


def test_monte_carlo_agrees_with_enumeration(random_state):
    state = random_state(4)
    for t in (3, optimal_iterations(16, 2)):
        estimate = average_success_mc(state, 2, t, samples=5000, seed=7)
        exact = average_success_exact(state, 2, t)
        assert estimate.method is AveragingMethod.MONTE_CARLO
        assert estimate.samples == 5000
        assert abs(estimate.value - exact.value) <= 4 * estimate.std_error


def test_monte_carlo_is_deterministic(random_state):
    state = random_state(5)
    first = average_success_mc(state, 3, 4, samples=200, seed=42)
    second = average_success_mc(state, 3, 4, samples=200, seed=42)
    assert first == second
    assert first.value != average_success_mc(state, 3, 4, samples=200, seed=43).value


def test_monte_carlo_is_unbiased_over_seeds(random_state):
    state = random_state(4)
    exact = average_success_exact(state, 3, 2).value
    estimates = [average_success_mc(state, 3, 2, samples=200, seed=seed) for seed in range(50)]
    mean = math.fsum(e.value for e in estimates) / len(estimates)
    pooled = math.sqrt(math.fsum(e.std_error ** 2 for e in estimates)) / len(estimates)
    assert pooled > 0.0
    assert abs(mean - exact) <= 4 * pooled


def test_sample_marked_set_rejects_r_above_n():
    with pytest.raises(InvalidCount, match="^r: "):
        sample_marked_set(2, 5, seed=1)
    with pytest.raises(InvalidCount):
        sample_marked_set(2, 0, seed=1)


def test_monte_carlo_rejects_few_samples(random_state):
    with pytest.raises(InvalidCount):
        average_success_mc(random_state(3), 1, 1, samples=1, seed=0)


def test_sample_marked_set_streams():
    first = sample_marked_set(6, 4, seed=5)
    assert first == sample_marked_set(6, 4, seed=5, stream=0)
    assert first.r == 4
    assert all(0 <= i < 64 for i in first.indices)
    draws = {sample_marked_set(6, 4, seed=5, stream=j).indices for j in range(20)}
    assert len(draws) > 1


def test_closed_average_uniform_state_is_textbook():
    for n, r in ((2, 1), (5, 3), (8, 1)):
        n_total = 1 << n
        omega = rotation_angle(n_total, r)
        for t in range(6):
            expected = math.sin(omega * (t + 0.5)) ** 2
            assert average_success_closed(uniform_state(n), r, t) == pytest.approx(expected, abs=1e-12)


def test_closed_average_uniform_matches_enumeration():
    eta = uniform_state(4)
    for t in range(5):
        assert average_success_closed(eta, 3, t) == pytest.approx(average_success_exact(eta, 3, t).value, abs=1e-12)


def test_optimal_iterations_maximize_closed_average():
    for n in range(2, 11):
        n_total = 1 << n
        for r in sorted({1, 2, n_total // 4, n_total // 2, n_total}):
            tau = optimal_iterations(n_total, r)
            eta = uniform_state(n)
            values = [average_success_closed(eta, r, t) for t in range(2 * tau + 1)]
            assert abs(int(np.argmax(values)) - tau) <= 1, (n, r)


def test_closed_average_zero_mean_state():
    for t in range(5):
        assert average_success_closed(ZERO_MEAN, 1, t) == pytest.approx(0.25, abs=1e-15)


def test_closed_average_without_correction(random_state):
    state = random_state(4)
    weight = 16 * abs(state.amplitudes.mean()) ** 2
    expected = weight * math.sin(rotation_angle(16, 2) * 3.5) ** 2
    assert average_success_closed(state, 2, 3, include_correction=False) == pytest.approx(expected, abs=1e-12)


def test_closed_average_accuracy_at_large_n(rng, random_state):
    n_total = 256
    tau = optimal_iterations(n_total, 1)
    for _ in range(50):
        state = random_state(8)
        for t in [tau] + rng.integers(0, 60, size=5).tolist():
            exact = average_success_exact(state, 1, t).value
            assert abs(exact - average_success_closed(state, 1, t)) <= 10 / n_total


def test_moments_p0_and_uniform():
    eta = uniform_state(4)
    moments = moment_averages(eta, 3)
    assert moments.mean_p0 == pytest.approx(3 / 16, abs=1e-12)
    assert moments.mean_abs_abar_u_sq == pytest.approx(1 / 16, abs=1e-15)


def test_averaging_identity(random_state):
    for r in (1, 2, 3):
        for _ in range(20):
            state = random_state(4)
            moments = moment_averages(state, r, AveragingMethod.ENUMERATION)
            assert moments.mean_p0 == pytest.approx(r / 16, abs=1e-12)
            for t in (0, 1, 4, 9):
                exact = average_success_exact(state, r, t).value
                assert average_success_from_moments(moments, t) == pytest.approx(exact, abs=1e-10)


@pytest.mark.parametrize("n,r", [(4, 1), (4, 2), (4, 3), (4, 7), (6, 2), (6, 4)])
def test_exact_moment_formulas(random_state, n, r):
    state = random_state(n)
    enumerated = moment_averages(state, r, AveragingMethod.ENUMERATION)
    exact = moment_averages(state, r, "exact")
    assert exact.mean_p0 == pytest.approx(enumerated.mean_p0, abs=1e-12)
    assert exact.mean_abs_abar_u_sq == pytest.approx(enumerated.mean_abs_abar_u_sq, abs=1e-12)
    assert exact.mean_abs_abar_m_sq == pytest.approx(enumerated.mean_abs_abar_m_sq, abs=1e-12)
    assert abs(exact.mean_cross - enumerated.mean_cross) <= 1e-12


@pytest.mark.parametrize("n,r", [(4, 2), (6, 4)])
def test_leading_moment_forms(random_state, n, r):
    n_total = 1 << n
    state = random_state(n)
    enumerated = moment_averages(state, r)
    closed = moment_averages(state, r, AveragingMethod.CLOSED_FORM)
    bound = 50 / n_total ** 2
    assert abs(enumerated.mean_abs_abar_u_sq - closed.mean_abs_abar_u_sq) <= bound
    assert abs(enumerated.mean_abs_abar_m_sq - closed.mean_abs_abar_m_sq) <= bound
    assert abs(enumerated.mean_cross - closed.mean_cross) <= bound


def test_moments_exact_method_drives_average(random_state):
    state = random_state(5)
    moments = moment_averages(state, 3, AveragingMethod.EXACT)
    for t in (0, 2, 6):
        exact = average_success_exact(state, 3, t).value
        assert average_success_from_moments(moments, t) == pytest.approx(exact, abs=1e-10)


def test_moment_averages_rejects_monte_carlo(random_state):
    with pytest.raises(InvalidCount):
        moment_averages(random_state(3), 2, AveragingMethod.MONTE_CARLO)


def test_max_success():
    assert max_success(uniform_state(3), 2) == pytest.approx(1.0, abs=1e-15)
    assert max_success(basis_state(3, 4), 1) == pytest.approx(1 / 8, abs=1e-15)
    assert max_success(ZERO_MEAN, 1) == 0.0
