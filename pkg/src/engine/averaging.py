"""Success probability averaged over the unknown choice of the r marked states.

Three routes to the same quantity: exact enumeration of every r-subset,
Monte Carlo over sampled subsets, and the large-N closed form in terms of the
global mean amplitude.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.core.errors import BudgetExceeded, InvalidCount
from src.core.states import MarkedSet, PureState, global_mean, new_marked_set
from src.engine.algebraic import rotation_angle, success_formula
from src.utils.rng import child_rng, partial_fisher_yates

logger = logging.getLogger(__name__)

ENUMERATION_BUDGET = 10 ** 6
# Subsets are gathered into index blocks of this many rows before summation.
CHUNK_SIZE = 4096


class AveragingMethod(str, Enum):
    """Averaging method enumeration."""
    ENUMERATION = "enumeration"
    MONTE_CARLO = "monte_carlo"
    CLOSED_FORM = "closed_form"
    EXACT = "exact"


class AverageEstimate(BaseModel):
    """Averaged success probability with its uncertainty."""
    model_config = ConfigDict(frozen=True)

    value: float = Field(..., ge=0, le=1)
    std_error: float = Field(..., ge=0)
    samples: int = Field(..., ge=0)
    method: AveragingMethod


@dataclass(frozen=True)
class MomentAverages:
    """Subset averages of P0 and of the second moments of the mean amplitudes.

    ``mean_cross`` is <conj(abar_U) abar_M>; its mirror <abar_M conj(abar_U)>
    is the complex conjugate.
    """

    mean_p0: float
    mean_abs_abar_u_sq: float
    mean_abs_abar_m_sq: float
    mean_cross: complex
    r: int
    n_total: int

    @property
    def mean_cross_mirror(self) -> complex:
        return self.mean_cross.conjugate()


def _check_r(state: PureState, r: int) -> None:
    if isinstance(r, bool) or not isinstance(r, (int, np.integer)) or not 1 <= r <= state.n_total:
        raise InvalidCount(f"need 1 <= r <= N={state.n_total}, got r={r!r}")


def _check_t(t: int) -> None:
    if isinstance(t, bool) or not isinstance(t, (int, np.integer)) or t < 0:
        raise InvalidCount(f"t must be a non-negative integer, got {t!r}")


def _check_budget(n_total: int, r: int, budget: int) -> int:
    count = math.comb(n_total, r)
    if count > budget:
        raise BudgetExceeded(f"C({n_total}, {r}) = {count} subsets exceeds the enumeration budget {budget}")
    return count


def _subset_blocks(n_total: int, r: int) -> Iterator[np.ndarray]:
    """Lexicographic r-subsets of range(n_total) as (rows, r) index blocks."""
    combos = itertools.combinations(range(n_total), r)
    while True:
        block = list(itertools.islice(combos, CHUNK_SIZE))
        if not block:
            return
        yield np.array(block, dtype=np.int64).reshape(len(block), r)


def _subset_moments(amplitudes: np.ndarray, total: complex, index: np.ndarray) -> Tuple[np.ndarray, ...]:
    """P0, abar_M and abar_U for each row of an index block."""
    n_total = amplitudes.size
    r = index.shape[1]
    picked = amplitudes[index]
    marked_sum = picked.sum(axis=1)
    p0 = (picked.real ** 2 + picked.imag ** 2).sum(axis=1)
    abar_m = marked_sum / r
    if r == n_total:
        abar_u = np.zeros_like(abar_m)
    else:
        abar_u = (total - marked_sum) / (n_total - r)
    return p0, abar_m, abar_u


def _shifted_mean(values: np.ndarray) -> float:
    # Identical values give back exactly that value.
    pivot = values[0]
    return float(pivot + np.mean(values - pivot))


def _enumerated_success(state: PureState, r: int, t: int, budget: int) -> np.ndarray:
    _check_budget(state.n_total, r, budget)
    amplitudes = state.amplitudes
    total = complex(amplitudes.sum())
    omega = rotation_angle(state.n_total, r)
    chunks = []
    for index in _subset_blocks(state.n_total, r):
        p0, abar_m, abar_u = _subset_moments(amplitudes, total, index)
        chunks.append(success_formula(p0, abar_m, abar_u, r, state.n_total, omega, t))
    return np.concatenate(chunks)


def _clip_probability(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def average_success_exact(state: PureState, r: int, t: int, budget: int = ENUMERATION_BUDGET) -> AverageEstimate:
    """Mean closed-form success probability over every r-subset, in lexicographic order.

    Raises:
        InvalidCount: if r is outside [1, N]
        BudgetExceeded: if C(N, r) exceeds ``budget``
    """
    _check_r(state, r)
    _check_t(t)
    values = _enumerated_success(state, r, t, budget)
    logger.debug(f"Enumerated {values.size} marked sets (N={state.n_total}, r={r}, t={t})")
    return AverageEstimate(value=_clip_probability(_shifted_mean(values)), std_error=0.0,
                           samples=int(values.size), method=AveragingMethod.ENUMERATION)


def sample_marked_set(n: int, r: int, seed: int, stream: int = 0) -> MarkedSet:
    """Uniform r-subset drawn from the (seed, stream) random stream.

    Raises:
        InvalidCount: if r is outside [1, N]
    """
    size = 1 << n
    if isinstance(r, bool) or not isinstance(r, (int, np.integer)) or not 1 <= r <= size:
        raise InvalidCount(f"r: need 1 <= r <= N={size}, got r={r!r}")
    rng = child_rng(seed, stream)
    return new_marked_set(n, partial_fisher_yates(rng, size, r))


def average_success_mc(state: PureState, r: int, t: int, samples: int, seed: int) -> AverageEstimate:
    """Monte Carlo estimate of the subset-averaged success probability.

    Sample j draws its subset from the stream (seed, j), so the estimate does
    not depend on evaluation order.

    Raises:
        InvalidCount: if r is outside [1, N] or samples < 2
    """
    _check_r(state, r)
    _check_t(t)
    if isinstance(samples, bool) or not isinstance(samples, (int, np.integer)) or samples < 2:
        raise InvalidCount(f"samples must be an integer >= 2, got {samples!r}")

    amplitudes = state.amplitudes
    total = complex(amplitudes.sum())
    omega = rotation_angle(state.n_total, r)
    index = np.array(
        [partial_fisher_yates(child_rng(seed, j), state.n_total, r) for j in range(samples)],
        dtype=np.int64,
    ).reshape(samples, r)
    p0, abar_m, abar_u = _subset_moments(amplitudes, total, index)
    values = success_formula(p0, abar_m, abar_u, r, state.n_total, omega, t)

    std_error = float(np.std(values - values[0], ddof=1) / math.sqrt(samples))
    logger.debug(f"Monte Carlo over {samples} marked sets: std_error={std_error:.3g}")
    return AverageEstimate(value=_clip_probability(_shifted_mean(values)), std_error=std_error,
                           samples=samples, method=AveragingMethod.MONTE_CARLO)


def average_success_closed(state: PureState, r: int, t: int, include_correction: bool = True) -> float:
    """Large-N closed form N|abar|^2 sin^2[omega (t + 1/2)] + (r/N)(1 - N|abar|^2).

    Args:
        state: Initial state
        r: Number of marked states
        t: Iteration count
        include_correction: Keep the (r/N)(1 - N|abar|^2) term; without it only
            the leading term valid for r << N remains

    Returns:
        Averaged success probability up to an O(1/N) remainder
    """
    _check_r(state, r)
    _check_t(t)
    n_total = state.n_total
    weight = n_total * abs(global_mean(state)) ** 2
    return closed_average_from_weight(weight, r, n_total, t, include_correction)


def closed_average_from_weight(weight: float, r: int, n_total: int, t: int, include_correction: bool = True) -> float:
    """Closed-form average for a given leading weight N|abar|^2 (pure or ensemble-averaged)."""
    omega = rotation_angle(n_total, r)
    value = weight * math.sin(omega * (t + 0.5)) ** 2
    if include_correction:
        value += (r / n_total) * (1.0 - weight)
    return value


def _moments_by_enumeration(state: PureState, r: int, budget: int) -> MomentAverages:
    count = _check_budget(state.n_total, r, budget)
    amplitudes = state.amplitudes
    total = complex(amplitudes.sum())
    sums = np.zeros(4, dtype=np.complex128)
    for index in _subset_blocks(state.n_total, r):
        p0, abar_m, abar_u = _subset_moments(amplitudes, total, index)
        sums += (
            p0.sum(),
            (np.abs(abar_u) ** 2).sum(),
            (np.abs(abar_m) ** 2).sum(),
            (np.conj(abar_u) * abar_m).sum(),
        )
    sums /= count
    return MomentAverages(mean_p0=float(sums[0].real), mean_abs_abar_u_sq=float(sums[1].real),
                          mean_abs_abar_m_sq=float(sums[2].real), mean_cross=complex(sums[3]),
                          r=r, n_total=state.n_total)


def _expected_abs_sum_sq(s1_sq: float, s2: float, n_total: int, k: int) -> float:
    """E|sum of a_i over a uniform k-subset|^2 in terms of |S1|^2 and S2."""
    if k == 0:
        return 0.0
    pair_weight = k * (k - 1) / (n_total * (n_total - 1))
    return (k / n_total) * s2 + pair_weight * (s1_sq - s2)


def _moments_exact(state: PureState, r: int) -> MomentAverages:
    n_total = state.n_total
    amplitudes = state.amplitudes
    s1_sq = abs(complex(amplitudes.sum())) ** 2
    s2 = float(np.vdot(amplitudes, amplitudes).real)
    unmarked = n_total - r

    marked_sq = _expected_abs_sum_sq(s1_sq, s2, n_total, r)
    unmarked_sq = _expected_abs_sum_sq(s1_sq, s2, n_total, unmarked)
    # E[sum_M a * conj(sum_U a)] = (r/N)|S1|^2 - E|sum_M a|^2, which is real.
    cross = ((r / n_total) * s1_sq - marked_sq) / (r * unmarked) if unmarked else 0.0
    return MomentAverages(
        mean_p0=(r / n_total) * s2,
        mean_abs_abar_u_sq=unmarked_sq / unmarked ** 2 if unmarked else 0.0,
        mean_abs_abar_m_sq=marked_sq / r ** 2,
        mean_cross=complex(cross),
        r=r,
        n_total=n_total,
    )


def _moments_closed(state: PureState, r: int) -> MomentAverages:
    n_total = state.n_total
    abar_sq = abs(global_mean(state)) ** 2
    return MomentAverages(
        mean_p0=r / n_total,
        mean_abs_abar_u_sq=abar_sq,
        mean_abs_abar_m_sq=abar_sq * (1.0 - 1.0 / r) + 1.0 / (r * n_total),
        mean_cross=complex(abar_sq),
        r=r,
        n_total=n_total,
    )


def moment_averages(state: PureState, r: int, method: AveragingMethod = AveragingMethod.ENUMERATION,
                    budget: int = ENUMERATION_BUDGET) -> MomentAverages:
    """Subset averages of P0, |abar_U|^2, |abar_M|^2 and conj(abar_U) abar_M.

    ``enumeration`` averages over every subset, ``exact`` uses the finite-N
    formulas in S1 = sum a_i and S2 = sum |a_i|^2, ``closed_form`` the
    leading large-N expressions.

    Raises:
        InvalidCount: if r is outside [1, N] or the method is not supported
        BudgetExceeded: enumeration with C(N, r) above ``budget``
    """
    _check_r(state, r)
    method = AveragingMethod(method)
    if method is AveragingMethod.ENUMERATION:
        return _moments_by_enumeration(state, r, budget)
    if method is AveragingMethod.EXACT:
        return _moments_exact(state, r)
    if method is AveragingMethod.CLOSED_FORM:
        return _moments_closed(state, r)
    raise InvalidCount(f"moment averages do not support method {method.value!r}")


def average_success_from_moments(moments: MomentAverages, t: int) -> float:
    """Subset-averaged success probability written in terms of averaged moments."""
    _check_t(t)
    n_total, r = moments.n_total, moments.r
    omega = rotation_angle(n_total, r)
    spread = (n_total - r) * moments.mean_abs_abar_u_sq - r * moments.mean_abs_abar_m_sq
    cross = (moments.mean_cross + moments.mean_cross_mirror).real
    return float(
        moments.mean_p0
        + 0.5 * spread
        - 0.5 * spread * math.cos(2.0 * omega * t)
        + 0.5 * math.sqrt(r * (n_total - r)) * cross * math.sin(2.0 * omega * t)
    )


def max_success(state: PureState, r: int) -> float:
    """N|abar|^2, the averaged success probability at the optimal time (leading order)."""
    _check_r(state, r)
    return state.n_total * abs(global_mean(state)) ** 2
