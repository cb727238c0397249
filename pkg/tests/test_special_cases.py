import math

import numpy as np
import pytest

from src.core.errors import ComplexAmplitudes, FullyMarked, InconsistentStats, NotNormalized
from src.core.partition import partition_stats
from src.core.states import basis_state, new_marked_set, new_pure_state, uniform_state
from src.engine.algebraic import build_frame, rotation_angle
from src.engine.special_cases import (
    CaseKind,
    CylinderGeometry,
    classify,
    cylinder_geometry,
    cylinder_trajectory,
    grover_plane_coordinates,
    in_plane_evolution,
    perpendicular_evolution,
)
from src.engine.statevector import evolution_path, evolve, success_probability


def _perpendicular(state, marked):
    """Remove the Grover-plane components of ``state`` and renormalize."""
    frame = build_frame(state, marked)
    values = state.amplitudes.copy()
    for member in (frame.eta_u.amplitudes, frame.eta_m.amplitudes):
        values -= np.vdot(member, values) * member
    return new_pure_state(state.n, values / np.linalg.norm(values))


def test_classify_uniform_is_in_plane():
    for indices in ([0], [1, 2], [0, 3, 5, 6]):
        label = classify(uniform_state(3), new_marked_set(3, indices))
        assert label.kind is CaseKind.IN_PLANE


def test_classify_perpendicular(perpendicular_state):
    label = classify(perpendicular_state, new_marked_set(2, [0]))
    assert label.kind is CaseKind.PERPENDICULAR
    assert label.witness.abs_psi_u == pytest.approx(1.0, abs=1e-15)
    assert label.witness.r == 1


def test_classify_generic_and_single_marked(random_state):
    state = random_state(4)
    assert classify(state, new_marked_set(4, [3, 9])).kind is CaseKind.GENERIC
    assert classify(state, new_marked_set(4, [9])).kind is CaseKind.SINGLE_MARKED


def test_classify_fully_marked(random_state):
    assert classify(uniform_state(2), new_marked_set(2, range(4))).kind is CaseKind.IN_PLANE
    assert classify(random_state(2), new_marked_set(2, range(4))).kind is CaseKind.GENERIC


def test_cylinder_geometry_examples(perpendicular_state):
    geometry = cylinder_geometry(uniform_state(2), 3)
    assert geometry.radius == pytest.approx(1.0, abs=1e-15)
    assert geometry.length == pytest.approx(0.0, abs=1e-7)

    geometry = cylinder_geometry(basis_state(3, 5), 5)
    assert (geometry.radius, geometry.length) == (1.0, 0.0)

    geometry = cylinder_geometry(perpendicular_state, 0)
    assert (geometry.radius, geometry.length) == (0.0, 2.0)


def test_cylinder_geometry_rejects_complex(random_state):
    with pytest.raises(ComplexAmplitudes):
        cylinder_geometry(random_state(3), 1)


def test_cylinder_geometry_model_checks_split():
    with pytest.raises(ValueError):
        CylinderGeometry(radius=0.5, length=0.5)


def test_cylinder_trajectory_invariants(random_state):
    state = random_state(5, real=True)
    geometry = cylinder_geometry(state, 7)
    points = cylinder_trajectory(state, 7, 40)
    assert len(points) == 41
    for point in points:
        assert point.radius == pytest.approx(geometry.radius, abs=1e-10)
        assert abs(point.axis) == pytest.approx(geometry.length / 2, abs=1e-10)
    # the axis component alternates between the two bases
    assert points[0].axis * points[1].axis < 0
    assert points[0].axis == pytest.approx(points[2].axis, abs=1e-10)


def test_cylinder_trajectory_rotates_in_plane(random_state):
    state = random_state(4, real=True)
    marked = new_marked_set(4, [2])
    alpha, beta = grover_plane_coordinates(state, marked)
    norm = math.hypot(abs(alpha), abs(beta))
    omega = rotation_angle(16, 1)
    for point in cylinder_trajectory(state, 2, 12):
        u, m = in_plane_evolution(alpha / norm, beta / norm, omega, point.t)
        assert point.eta_u == pytest.approx(norm * u.real, abs=1e-10)
        assert point.eta_m == pytest.approx(norm * m.real, abs=1e-10)


def test_grover_plane_coordinates():
    alpha, beta = grover_plane_coordinates(uniform_state(3), new_marked_set(3, [1, 4]))
    assert alpha == pytest.approx(math.sqrt(6 / 8), abs=1e-15)
    assert beta == pytest.approx(math.sqrt(2 / 8), abs=1e-15)
    with pytest.raises(FullyMarked):
        grover_plane_coordinates(uniform_state(1), new_marked_set(1, [0, 1]))


def test_in_plane_evolution_rotation():
    omega = 0.37
    for t in (0, 1, 5, 13):
        u, m = in_plane_evolution(1.0, 0.0, omega, t)
        assert u == pytest.approx(math.cos(omega * t), abs=1e-15)
        assert m == pytest.approx(math.sin(omega * t), abs=1e-15)


def test_in_plane_evolution_period():
    alpha, beta = 0.6 + 0.0j, 0.0 + 0.8j
    u, m = in_plane_evolution(alpha, beta, math.pi / 3, 6)
    assert u == pytest.approx(alpha, abs=1e-12)
    assert m == pytest.approx(beta, abs=1e-12)


def test_in_plane_evolution_rejects_unnormalized():
    with pytest.raises(NotNormalized):
        in_plane_evolution(0.5, 0.5, 0.1, 1)


def test_in_plane_states_follow_rotation(rng):
    n = 6
    marked = new_marked_set(n, [4, 17, 40])
    frame = build_frame(uniform_state(n), marked)
    coeffs = rng.normal(size=2) + 1j * rng.normal(size=2)
    alpha, beta = coeffs / np.linalg.norm(coeffs)
    state = new_pure_state(n, alpha * frame.eta_u.amplitudes + beta * frame.eta_m.amplitudes)
    assert classify(state, marked).kind is CaseKind.IN_PLANE

    for t, buffer in enumerate(evolution_path(state, marked, 100)):
        u, m = in_plane_evolution(alpha, beta, frame.omega, t)
        assert abs(np.vdot(frame.eta_u.amplitudes, buffer) - u) <= 1e-12
        assert abs(np.vdot(frame.eta_m.amplitudes, buffer) - m) <= 1e-12


def test_perpendicular_evolution():
    assert all(perpendicular_evolution(0.0, t) == 0.0 for t in range(10))
    assert all(perpendicular_evolution(1.0, t) == 1.0 for t in range(10))
    assert perpendicular_evolution(0.3, 17) == 0.3
    with pytest.raises(InconsistentStats):
        perpendicular_evolution(1.5, 1)


def test_perpendicular_states_recur_with_period_two(random_state):
    marked = new_marked_set(5, [0, 9, 21])
    state = _perpendicular(random_state(5), marked)
    assert classify(state, marked).kind is CaseKind.PERPENDICULAR
    p0 = partition_stats(state, marked).p0
    for t in range(12):
        assert success_probability(evolve(state, marked, t), marked) == pytest.approx(p0, abs=1e-10)
    np.testing.assert_allclose(evolve(state, marked, 2).amplitudes, state.amplitudes, atol=1e-10)
