"""Special initial states: single marked state, Grover-plane and perpendicular states."""
import logging
import math
from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.core.errors import ComplexAmplitudes, FullyMarked, InconsistentStats, InvalidCount, NotNormalized
from src.core.partition import partition_stats
from src.core.states import MarkedSet, PureState, check_dimensions, new_marked_set
from src.engine.algebraic import build_frame, decompose
from src.engine.statevector import evolution_path

logger = logging.getLogger(__name__)

# Stricter than the frame's degeneracy threshold, so an ambiguous state is never labelled special.
CLASSIFY_THRESHOLD = 1e-9
REAL_TOLERANCE = 1e-12


class CaseKind(str, Enum):
    """Case enumeration."""
    SINGLE_MARKED = "single_marked"
    IN_PLANE = "in_plane"
    PERPENDICULAR = "perpendicular"
    GENERIC = "generic"


class CaseWitness(BaseModel):
    """Coordinate magnitudes a classification was based on."""
    model_config = ConfigDict(frozen=True)

    abs_psi_m: float = Field(..., ge=0)
    abs_psi_u: float = Field(..., ge=0)
    abs_eta_u: float = Field(..., ge=0)
    abs_eta_m: float = Field(..., ge=0)
    r: int = Field(..., ge=1)


class CaseLabel(BaseModel):
    """Classification result."""
    model_config = ConfigDict(frozen=True)

    kind: CaseKind
    witness: CaseWitness


class CylinderGeometry(BaseModel):
    """Cylinder traced by a real single-marked search: radius in the Grover plane, length along psi_U."""
    model_config = ConfigDict(frozen=True)

    radius: float = Field(..., ge=0, le=1)
    length: float = Field(..., ge=0, le=2)

    @model_validator(mode="after")
    def _normalization_split(self):
        total = self.radius ** 2 + (self.length / 2) ** 2
        if abs(total - 1.0) > REAL_TOLERANCE:
            raise ValueError(f"R^2 + (L/2)^2 = {total!r}, expected 1")
        return self


class CylinderPoint(BaseModel):
    """Simulator state at one step, in cylinder coordinates."""
    model_config = ConfigDict(frozen=True)

    t: int
    radius: float
    axis: float
    eta_u: float
    eta_m: float


def _coordinate_magnitudes(state: PureState, marked: MarkedSet) -> Tuple[float, float, float, float]:
    if not marked.is_full:
        frame = build_frame(state, marked)
        vec = decompose(state, frame, frame.stats)
        return abs(vec.c_psi_m), abs(vec.c_psi_u), abs(vec.c_eta_u), abs(vec.c_eta_m)
    # No unmarked subspace: only psi_M and eta_M exist.
    stats = partition_stats(state, marked)
    along_eta = stats.n_total * abs(stats.abar_m) ** 2
    return math.sqrt(max(stats.p0 - along_eta, 0.0)), 0.0, 0.0, math.sqrt(along_eta)


def classify(state: PureState, marked: MarkedSet) -> CaseLabel:
    """Label the (state, marked set) pair.

    in_plane and perpendicular are checked first since they pin the state
    down further than r = 1 does; remaining r = 1 pairs are single_marked.
    """
    check_dimensions(state, marked)
    psi_m, psi_u, eta_u, eta_m = _coordinate_magnitudes(state, marked)
    witness = CaseWitness(abs_psi_m=psi_m, abs_psi_u=psi_u, abs_eta_u=eta_u, abs_eta_m=eta_m, r=marked.r)

    if psi_m <= CLASSIFY_THRESHOLD and psi_u <= CLASSIFY_THRESHOLD:
        kind = CaseKind.IN_PLANE
    elif eta_m <= CLASSIFY_THRESHOLD and eta_u <= CLASSIFY_THRESHOLD:
        kind = CaseKind.PERPENDICULAR
    elif marked.r == 1:
        kind = CaseKind.SINGLE_MARKED
    else:
        kind = CaseKind.GENERIC
    logger.debug(f"Classified state as {kind.value}")
    return CaseLabel(kind=kind, witness=witness)


def _require_real(state: PureState) -> None:
    worst = float(np.max(np.abs(state.amplitudes.imag)))
    if worst > REAL_TOLERANCE:
        raise ComplexAmplitudes(f"cylinder picture needs real amplitudes; max |Im a_i| = {worst:.3g}")


def cylinder_geometry(state: PureState, marked_index: int) -> CylinderGeometry:
    """Radius R = sqrt((N-1)|abar_U|^2 + |a_m|^2) and length L = 2 sqrt(1 - R^2).

    Raises:
        ComplexAmplitudes: if any imaginary part exceeds 1e-12
        InconsistentStats: if R exceeds 1 beyond tolerance
    """
    _require_real(state)
    marked = new_marked_set(state.n, [marked_index])
    stats = partition_stats(state, marked)
    radius_sq = (stats.n_total - 1) * abs(stats.abar_u) ** 2 + stats.p0
    if radius_sq > 1.0 + REAL_TOLERANCE:
        raise InconsistentStats(f"cylinder radius^2 = {radius_sq!r} exceeds 1")
    radius_sq = min(radius_sq, 1.0)
    return CylinderGeometry(radius=math.sqrt(radius_sq), length=2.0 * math.sqrt(1.0 - radius_sq))


def cylinder_trajectory(state: PureState, marked_index: int, t_max: int) -> List[CylinderPoint]:
    """Follow the simulator state around the cylinder for t = 0..t_max.

    ``axis`` is the signed psi_U component: it alternates between the two
    bases at successive steps.
    """
    _require_real(state)
    marked = new_marked_set(state.n, [marked_index])
    frame = build_frame(state, marked)
    eta_u, eta_m = frame.eta_u.amplitudes, frame.eta_m.amplitudes

    points = []
    for t, buffer in enumerate(evolution_path(state, marked, t_max)):
        c_eta_u = float(np.vdot(eta_u, buffer).real)
        c_eta_m = float(np.vdot(eta_m, buffer).real)
        axis = float(np.vdot(frame.psi_u.amplitudes, buffer).real) if frame.psi_u is not None else 0.0
        points.append(CylinderPoint(t=t, radius=math.hypot(c_eta_u, c_eta_m), axis=axis,
                                    eta_u=c_eta_u, eta_m=c_eta_m))
    return points


def grover_plane_coordinates(state: PureState, marked: MarkedSet) -> Tuple[complex, complex]:
    """(alpha, beta) = (sqrt(N-r) abar_U, sqrt(r) abar_M), the eta_U and eta_M components."""
    check_dimensions(state, marked)
    if marked.is_full:
        raise FullyMarked("eta_U is undefined when r == N")
    stats = partition_stats(state, marked)
    return (complex(math.sqrt(stats.n_total - stats.r) * stats.abar_u),
            complex(math.sqrt(stats.r) * stats.abar_m))


def in_plane_evolution(alpha: complex, beta: complex, omega: float, t: int) -> Tuple[complex, complex]:
    """Rotate Grover-plane coordinates by omega*t.

    Raises:
        NotNormalized: if |alpha|^2 + |beta|^2 differs from 1 by more than 1e-10
    """
    norm_sq = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm_sq - 1.0) > 1e-10:
        raise NotNormalized(f"|alpha|^2 + |beta|^2 = {norm_sq!r}, expected 1")
    if t < 0:
        raise InvalidCount(f"t must be non-negative, got {t}")
    cos_t, sin_t = math.cos(omega * t), math.sin(omega * t)
    return alpha * cos_t - beta * sin_t, alpha * sin_t + beta * cos_t


def perpendicular_evolution(p0: float, t: int) -> float:
    """Success probability of a state perpendicular to the Grover plane: P0 at every t."""
    if not 0.0 <= p0 <= 1.0:
        raise InconsistentStats(f"p0={p0!r} outside [0, 1]")
    if t < 0:
        raise InvalidCount(f"t must be non-negative, got {t}")
    return p0
