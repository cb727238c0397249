"""Register states, marked sets and mixed ensembles."""
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Tuple

import numpy as np

from src.core.errors import (
    DimensionMismatch,
    InvalidCount,
    InvalidMarkedSet,
    LengthMismatch,
    NotNormalized,
)

logger = logging.getLogger(__name__)

# Input tolerance: state files may come from low-precision sources.
NORM_TOLERANCE = 1e-8
# Ensemble weights must sum to one within this.
WEIGHT_TOLERANCE = 1e-10


def _readonly(values: np.ndarray) -> np.ndarray:
    out = np.array(values, dtype=np.complex128, copy=True)
    out.setflags(write=False)
    return out


def _check_qubits(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidCount(f"qubit count must be an integer >= 1, got {n!r}")
    return int(n)


def compensated_mean(values: np.ndarray) -> complex:
    """Mean of a complex vector with a second corrective pass.

    The first pass uses numpy's pairwise summation; the second sums the
    residuals around that estimate, which removes the leading rounding error.
    The reduction order depends only on the array length, so the result is
    deterministic.
    """
    size = values.size
    first = values.sum() / size
    return complex(first + (values - first).sum() / size)


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over the N = 2**n computational basis states."""

    n: int
    amplitudes: np.ndarray

    @property
    def n_total(self) -> int:
        return 1 << self.n

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def new_pure_state(n: int, amplitudes: Iterable[complex]) -> PureState:
    """Validate and wrap an amplitude sequence.

    Amplitudes are stored exactly as given; a state that is not normalized is
    rejected rather than rescaled.

    Args:
        n: Qubit count
        amplitudes: Sequence of 2**n complex amplitudes

    Returns:
        Validated PureState

    Raises:
        LengthMismatch: if the sequence length is not 2**n
        NotNormalized: if the squared norm deviates from 1 by more than 1e-8
    """
    n = _check_qubits(n)
    if not isinstance(amplitudes, np.ndarray):
        amplitudes = list(amplitudes)
    values = np.asarray(amplitudes, dtype=np.complex128)
    _validate_amplitudes(n, values)
    return PureState(n=n, amplitudes=_readonly(values))


def from_buffer(n: int, buffer: np.ndarray) -> PureState:
    """Wrap a complex128 working buffer without copying it.

    The buffer is validated like ``new_pure_state`` input and then frozen;
    the caller gives up ownership.
    """
    _validate_amplitudes(n, buffer)
    buffer.setflags(write=False)
    return PureState(n=n, amplitudes=buffer)


def _validate_amplitudes(n: int, values: np.ndarray) -> None:
    if values.ndim != 1 or values.size != (1 << n):
        raise LengthMismatch(f"expected {1 << n} amplitudes for n={n}, got shape {values.shape}")
    norm_sq = float(np.vdot(values, values).real)
    if not abs(norm_sq - 1.0) <= NORM_TOLERANCE:
        raise NotNormalized(f"sum of |a_i|^2 is {norm_sq!r}, expected 1 within {NORM_TOLERANCE}")


def uniform_state(n: int) -> PureState:
    """Equal superposition state: every amplitude is 1/sqrt(N)."""
    n = _check_qubits(n)
    size = 1 << n
    return PureState(n=n, amplitudes=_readonly(np.full(size, 1.0 / math.sqrt(size))))


def basis_state(n: int, index: int) -> PureState:
    """Computational basis state |index>."""
    n = _check_qubits(n)
    size = 1 << n
    if not 0 <= index < size:
        raise InvalidCount(f"basis index {index} out of range [0, {size})")
    values = np.zeros(size, dtype=np.complex128)
    values[index] = 1.0
    return PureState(n=n, amplitudes=_readonly(values))


def global_mean(state: PureState) -> complex:
    """Average over all amplitudes, (1/N) sum a_i."""
    return compensated_mean(state.amplitudes)


@dataclass(frozen=True, eq=True)
class MarkedSet:
    """Sorted set of r distinct marked basis indices of an n-qubit register."""

    n: int
    indices: Tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.indices)

    @property
    def n_total(self) -> int:
        return 1 << self.n

    @property
    def is_full(self) -> bool:
        return self.r == self.n_total

    @cached_property
    def index_array(self) -> np.ndarray:
        out = np.array(self.indices, dtype=np.int64)
        out.setflags(write=False)
        return out

    @cached_property
    def mask(self) -> np.ndarray:
        out = np.zeros(self.n_total, dtype=bool)
        out[self.index_array] = True
        out.setflags(write=False)
        return out


def new_marked_set(n: int, indices: Iterable[int]) -> MarkedSet:
    """Validate marked indices and canonicalize them to sorted order.

    Raises:
        InvalidMarkedSet: empty, duplicated or out-of-range indices
    """
    n = _check_qubits(n)
    size = 1 << n
    raw = [int(i) for i in indices]
    if not raw:
        raise InvalidMarkedSet("marked set must contain at least one index")
    if len(set(raw)) != len(raw):
        raise InvalidMarkedSet(f"marked indices must be unique, got {raw}")
    out_of_range = [i for i in raw if not 0 <= i < size]
    if out_of_range:
        raise InvalidMarkedSet(f"marked indices {out_of_range} out of range [0, {size})")
    return MarkedSet(n=n, indices=tuple(sorted(raw)))


def check_dimensions(state: PureState, marked: MarkedSet) -> None:
    if state.n != marked.n:
        raise DimensionMismatch(f"state has n={state.n} qubits but marked set has n={marked.n}")


@dataclass(frozen=True, eq=False)
class MixedEnsemble:
    """Probability-weighted pure states realizing a density operator."""

    n: int
    members: Tuple[Tuple[float, PureState], ...]

    @property
    def n_total(self) -> int:
        return 1 << self.n

    @property
    def weights(self) -> np.ndarray:
        return np.array([p for p, _ in self.members], dtype=float)


def new_mixed_ensemble(n: int, members: Sequence[Tuple[float, PureState]]) -> MixedEnsemble:
    """Validate an ensemble.

    Raises:
        InvalidCount: empty ensemble
        NotNormalized: a non-positive weight, or weights not summing to 1 within 1e-10
        DimensionMismatch: a member with a different qubit count
    """
    n = _check_qubits(n)
    if not members:
        raise InvalidCount("ensemble must contain at least one member")
    cleaned = []
    for position, (weight, state) in enumerate(members):
        weight = float(weight)
        if not weight > 0.0:
            raise NotNormalized(f"member {position} has non-positive weight {weight!r}")
        if state.n != n:
            raise DimensionMismatch(f"member {position} has n={state.n}, ensemble has n={n}")
        cleaned.append((weight, state))
    total = math.fsum(p for p, _ in cleaned)
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        raise NotNormalized(f"ensemble weights sum to {total!r}, expected 1 within {WEIGHT_TOLERANCE}")
    logger.debug(f"Ensemble with {len(cleaned)} members over n={n} qubits")
    return MixedEnsemble(n=n, members=tuple(cleaned))
