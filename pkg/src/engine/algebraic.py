"""Closed-form analysis of the Grover iteration in its four-dimensional invariant subspace.

For a state psi and a marked set M the iteration never leaves the span of
(psi_M, psi_U, eta_U, eta_M): it fixes psi_M, flips psi_U and rotates the
(eta_U, eta_M) Grover plane by omega, with cos(omega) = 1 - 2r/N. Everything
in this module follows from that block structure.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.core.errors import FrameMismatch, FullyMarked, InconsistentStats, InvalidCount
from src.core.partition import PartitionStats, partition_stats
from src.core.states import MarkedSet, PureState, check_dimensions, from_buffer
from src.engine.trace import ProbabilityTrace, TraceEntry

logger = logging.getLogger(__name__)

# Below this Gram-Schmidt norm the psi direction is numerically meaningless.
DEGENERATE_THRESHOLD = 1e-7
BOUNDS_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class FourDFrame:
    """Orthonormal quadruple (psi_M, psi_U, eta_U, eta_M) built for one state and marked set.

    ``psi_m``/``psi_u`` are None when their Gram-Schmidt norm falls below the
    degeneracy threshold; the matching coordinate is then zero.
    """

    psi_m: Optional[PureState]
    psi_u: Optional[PureState]
    eta_u: PureState
    eta_m: PureState
    omega: float
    norm_psi_m: float
    norm_psi_u: float
    marked: MarkedSet
    source: PureState
    stats: PartitionStats

    def members(self) -> List[Tuple[str, Optional[PureState]]]:
        return [
            ("psi_m", self.psi_m),
            ("psi_u", self.psi_u),
            ("eta_u", self.eta_u),
            ("eta_m", self.eta_m),
        ]


@dataclass(frozen=True)
class FourDVector:
    """Coordinates in a FourDFrame, ordered (psi_M, psi_U, eta_U, eta_M)."""

    c_psi_m: complex
    c_psi_u: complex
    c_eta_u: complex
    c_eta_m: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.c_psi_m, self.c_psi_u, self.c_eta_u, self.c_eta_m], dtype=np.complex128)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


def _check_count(n_total: int, r: int) -> None:
    for name, value in (("n_total", n_total), ("r", r)):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise InvalidCount(f"{name} must be an integer, got {value!r}")
    if not 1 <= r <= n_total:
        raise InvalidCount(f"need 1 <= r <= N, got r={r}, N={n_total}")


def _parity_sign(t: int) -> int:
    return -1 if t % 2 else 1


def rotation_angle(n_total: int, r: int) -> float:
    """Grover-plane rotation angle omega in (0, pi].

    cos and sin are formed from the exact ratio before the trig call so that
    r << N does not lose precision to cancellation.
    """
    _check_count(n_total, r)
    cos_omega = (n_total - 2 * r) / n_total
    sin_omega = 2.0 * math.sqrt(r * (n_total - r)) / n_total
    return math.atan2(sin_omega, cos_omega)


def optimal_iterations(n_total: int, r: int) -> int:
    """tau = floor((pi/4) * sqrt(N/r))."""
    _check_count(n_total, r)
    try:
        ratio = n_total / r
    except OverflowError:
        raise InvalidCount(f"N/r does not fit a float for N={n_total}, r={r}")
    return int(math.floor(math.pi / 4.0 * math.sqrt(ratio)))


def _unit_on(n: int, mask: np.ndarray) -> PureState:
    buffer = np.zeros(mask.size, dtype=np.complex128)
    buffer[mask] = 1.0 / math.sqrt(int(mask.sum()))
    return from_buffer(n, buffer)


def _gram_schmidt_part(amplitudes: np.ndarray, mask: np.ndarray, mean: complex) -> Tuple[Optional[np.ndarray], float]:
    """Component of the state inside ``mask`` orthogonal to the uniform vector on ``mask``.

    The projection is removed twice; one pass leaves a residual overlap of
    order eps/norm, which matters when the norm is small.
    """
    part = np.zeros_like(amplitudes)
    part[mask] = amplitudes[mask] - mean
    part[mask] -= part[mask].mean()
    norm = float(np.linalg.norm(part))
    if norm < DEGENERATE_THRESHOLD:
        return None, norm
    part /= norm
    return part, norm


def build_frame(state: PureState, marked: MarkedSet) -> FourDFrame:
    """Construct the invariant four-dimensional frame by Gram-Schmidt.

    Raises:
        DimensionMismatch: if state and marked set disagree on n
        FullyMarked: if r == N (eta_U is undefined)
    """
    check_dimensions(state, marked)
    if marked.is_full:
        raise FullyMarked("every basis state is marked; the unmarked direction eta_U is undefined")

    stats = partition_stats(state, marked)
    mask = marked.mask
    omega = rotation_angle(state.n_total, marked.r)

    psi_m_vec, norm_m = _gram_schmidt_part(state.amplitudes, mask, stats.abar_m)
    psi_u_vec, norm_u = _gram_schmidt_part(state.amplitudes, ~mask, stats.abar_u)
    if psi_m_vec is None:
        norm_m = 0.0
    if psi_u_vec is None:
        norm_u = 0.0

    frame = FourDFrame(
        psi_m=from_buffer(state.n, psi_m_vec) if psi_m_vec is not None else None,
        psi_u=from_buffer(state.n, psi_u_vec) if psi_u_vec is not None else None,
        eta_u=_unit_on(state.n, ~mask),
        eta_m=_unit_on(state.n, mask),
        omega=omega,
        norm_psi_m=norm_m,
        norm_psi_u=norm_u,
        marked=marked,
        source=state,
        stats=stats,
    )
    logger.debug(f"Frame built: psi_m {'present' if frame.psi_m else 'absent'}, "
                 f"psi_u {'present' if frame.psi_u else 'absent'}, omega={omega:.6g}")
    return frame


def _stats_match(a: PartitionStats, b: PartitionStats) -> bool:
    return (
        a.r == b.r
        and a.n_total == b.n_total
        and abs(a.p0 - b.p0) <= 1e-12
        and abs(a.abar_m - b.abar_m) <= 1e-12
        and abs(a.abar_u - b.abar_u) <= 1e-12
    )


def decompose(state: PureState, frame: FourDFrame, stats: PartitionStats) -> FourDVector:
    """Coordinates of the frame's own initial state.

    psi coordinates are the Gram-Schmidt norms sqrt(P0 - r|abar_M|^2) and
    sqrt(1 - P0 - (N-r)|abar_U|^2); eta coordinates are sqrt(N-r)*abar_U and
    sqrt(r)*abar_M.

    Raises:
        FrameMismatch: if state or stats are not the ones the frame was built from
    """
    if state.n != frame.source.n or not np.array_equal(state.amplitudes, frame.source.amplitudes):
        raise FrameMismatch("state is not the one the frame was built from")
    if not _stats_match(stats, frame.stats):
        raise FrameMismatch("partition stats do not belong to the frame's state and marked set")
    n_total, r = stats.n_total, stats.r
    return FourDVector(
        c_psi_m=complex(frame.norm_psi_m),
        c_psi_u=complex(frame.norm_psi_u),
        c_eta_u=complex(math.sqrt(n_total - r) * stats.abar_u),
        c_eta_m=complex(math.sqrt(r) * stats.abar_m),
    )


def project(state: PureState, frame: FourDFrame) -> FourDVector:
    """Coordinates of any state by inner products with the present frame members."""
    if state.n != frame.marked.n:
        raise FrameMismatch(f"state has n={state.n}, frame has n={frame.marked.n}")
    coords = [
        complex(np.vdot(member.amplitudes, state.amplitudes)) if member is not None else 0j
        for _, member in frame.members()
    ]
    return FourDVector(*coords)


def span_residual(state: PureState, frame: FourDFrame, vec: FourDVector) -> float:
    """Norm of the part of ``state`` not reproduced by ``vec`` in ``frame``."""
    rebuilt = np.zeros(state.n_total, dtype=np.complex128)
    for coeff, (_, member) in zip(vec.as_array(), frame.members()):
        if member is not None:
            rebuilt += coeff * member.amplitudes
    return float(np.linalg.norm(state.amplitudes - rebuilt))


def evolve_closed(vec: FourDVector, omega: float, t: int) -> FourDVector:
    """Apply Q^t in frame coordinates: fix psi_M, sign (-1)^t on psi_U, rotate the eta block by omega*t."""
    if t < 0:
        raise InvalidCount(f"t must be non-negative, got {t}")
    angle = omega * t
    cos_t, sin_t = math.cos(angle), math.sin(angle)
    return FourDVector(
        c_psi_m=vec.c_psi_m,
        c_psi_u=_parity_sign(t) * vec.c_psi_u,
        c_eta_u=cos_t * vec.c_eta_u - sin_t * vec.c_eta_m,
        c_eta_m=sin_t * vec.c_eta_u + cos_t * vec.c_eta_m,
    )


def success_formula(p0, abar_m, abar_u, r: int, n_total: int, omega: float, t: int):
    """Success probability after t iterations in its three-term form.

    Accepts numpy arrays for p0/abar_m/abar_u so subset averages can be
    evaluated in bulk.
    """
    spread = (n_total - r) * np.abs(abar_u) ** 2 - r * np.abs(abar_m) ** 2
    cross = np.conj(abar_u) * abar_m + np.conj(abar_m) * abar_u
    return (
        p0
        + 0.5 * spread
        - 0.5 * spread * math.cos(2.0 * omega * t)
        + 0.5 * math.sqrt(r * (n_total - r)) * np.real(cross) * math.sin(2.0 * omega * t)
    )


def success_probability_closed(stats: PartitionStats, omega: float, t: int) -> float:
    """Closed-form P_s(t) from the partition statistics."""
    return float(success_formula(stats.p0, stats.abar_m, stats.abar_u,
                                 stats.r, stats.n_total, omega, t))


def probability_bounds(stats: PartitionStats) -> Tuple[float, float]:
    """Lower and upper bound on P_s(t) over all t.

    Raises:
        InconsistentStats: if a bound leaves [0, 1] by more than 1e-12
    """
    p_max = stats.p0 + (stats.n_total - stats.r) * abs(stats.abar_u) ** 2
    p_min = stats.p0 - stats.r * abs(stats.abar_m) ** 2
    bounds = []
    for name, value in (("p_min", p_min), ("p_max", p_max)):
        if value < -BOUNDS_TOLERANCE or value > 1.0 + BOUNDS_TOLERANCE:
            raise InconsistentStats(f"{name}={value!r} outside [0, 1]")
        bounds.append(min(max(value, 0.0), 1.0))
    return bounds[0], bounds[1]


def mean_amplitudes(stats: PartitionStats, omega: float, t: int) -> Tuple[complex, complex]:
    """Average marked (kbar) and unmarked (lbar) amplitudes after t iterations.

    Raises:
        FullyMarked: if r == N
    """
    if stats.fully_marked:
        raise FullyMarked("mean unmarked amplitude is undefined when r == N")
    n_total, r = stats.n_total, stats.r
    cos_t, sin_t = math.cos(omega * t), math.sin(omega * t)
    kbar = math.sqrt((n_total - r) / r) * stats.abar_u * sin_t + stats.abar_m * cos_t
    lbar = stats.abar_u * cos_t - math.sqrt(r / (n_total - r)) * stats.abar_m * sin_t
    return complex(kbar), complex(lbar)


def reconstruct_state(initial: PureState, marked: MarkedSet, t: int) -> PureState:
    """Full state after t iterations from kbar(t), lbar(t) and the frozen deviations.

    Marked amplitudes are kbar + (a_m - abar_M); unmarked amplitudes are
    lbar + (-1)^t (a_u - abar_U).

    Raises:
        FullyMarked: if r == N
    """
    check_dimensions(initial, marked)
    if t < 0:
        raise InvalidCount(f"t must be non-negative, got {t}")
    stats = partition_stats(initial, marked)
    omega = rotation_angle(initial.n_total, marked.r)
    kbar, lbar = mean_amplitudes(stats, omega, t)

    mask = marked.mask
    amplitudes = initial.amplitudes
    buffer = np.empty_like(amplitudes)
    buffer[mask] = kbar + (amplitudes[mask] - stats.abar_m)
    buffer[~mask] = lbar + _parity_sign(t) * (amplitudes[~mask] - stats.abar_u)
    return from_buffer(initial.n, buffer)


def trace_closed(state: PureState, marked: MarkedSet, t_max: int) -> ProbabilityTrace:
    """Closed-form counterpart of ``statevector.trace_run``.

    With every index marked the unmarked mean is reported as 0 and the marked
    mean as abar_M * cos(omega t).
    """
    check_dimensions(state, marked)
    if t_max < 0:
        raise InvalidCount(f"t_max must be non-negative, got {t_max}")
    stats = partition_stats(state, marked)
    omega = rotation_angle(state.n_total, marked.r)
    p_min, p_max = probability_bounds(stats)

    entries = []
    for t in range(t_max + 1):
        if stats.fully_marked:
            kbar, lbar = complex(stats.abar_m * math.cos(omega * t)), 0j
        else:
            kbar, lbar = mean_amplitudes(stats, omega, t)
        entries.append(TraceEntry(
            t=t,
            p_success=success_probability_closed(stats, omega, t),
            p_min=p_min,
            p_max=p_max,
            kbar=kbar,
            lbar=lbar,
        ))
    return ProbabilityTrace(entries=tuple(entries))
