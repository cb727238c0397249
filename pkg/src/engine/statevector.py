"""Brute-force state-vector simulation of the Grover iteration.

Every amplitude of the N-dimensional register is updated explicitly. This is
the reference the closed forms in ``src.engine.algebraic`` are checked against.
"""
import logging
from typing import Iterator

import numpy as np

from src.core.errors import InvalidCount
from src.core.partition import partition_stats
from src.core.states import MarkedSet, PureState, check_dimensions, compensated_mean, from_buffer
from src.engine.algebraic import probability_bounds
from src.engine.trace import ProbabilityTrace, TraceEntry

logger = logging.getLogger(__name__)

# Iterations between full recomputations of the amplitude sum.
RESYNC_INTERVAL = 32


def _check_iterations(t: int, name: str = "t") -> int:
    if isinstance(t, bool) or not isinstance(t, (int, np.integer)) or t < 0:
        raise InvalidCount(f"{name} must be a non-negative integer, got {t!r}")
    return int(t)


def _oracle_inplace(buffer: np.ndarray, marked: MarkedSet) -> None:
    index = marked.index_array
    buffer[index] = -buffer[index]


def _diffusion_inplace(buffer: np.ndarray) -> None:
    mean = compensated_mean(buffer)
    np.subtract(2.0 * mean, buffer, out=buffer)


def _iterate(buffer: np.ndarray, marked: MarkedSet, steps: int) -> Iterator[None]:
    """Apply ``steps`` Grover iterations to ``buffer`` in place, yielding after each.

    Diffusion preserves the amplitude sum and the oracle shifts it by twice the
    marked sum, so the running sum costs O(r) per step. It is recomputed with
    compensated summation every RESYNC_INTERVAL steps.
    """
    index = marked.index_array
    size = buffer.size
    total = 0j
    for step in range(steps):
        if step % RESYNC_INTERVAL == 0:
            total = compensated_mean(buffer) * size
        marked_values = buffer[index]
        total -= 2.0 * complex(marked_values.sum())
        buffer[index] = -marked_values
        np.subtract(2.0 * (total / size), buffer, out=buffer)
        yield


def apply_oracle(state: PureState, marked: MarkedSet) -> PureState:
    """Flip the sign of every marked amplitude."""
    check_dimensions(state, marked)
    buffer = state.amplitudes.copy()
    _oracle_inplace(buffer, marked)
    return from_buffer(state.n, buffer)


def apply_diffusion(state: PureState) -> PureState:
    """Inversion about the mean: a_i -> 2*abar - a_i."""
    buffer = state.amplitudes.copy()
    _diffusion_inplace(buffer)
    return from_buffer(state.n, buffer)


def grover_step(state: PureState, marked: MarkedSet) -> PureState:
    """One Grover iteration Q = (-I + 2|eta><eta|) I_M, oracle first."""
    check_dimensions(state, marked)
    buffer = state.amplitudes.copy()
    _oracle_inplace(buffer, marked)
    _diffusion_inplace(buffer)
    return from_buffer(state.n, buffer)


def evolution_path(state: PureState, marked: MarkedSet, t_max: int) -> Iterator[np.ndarray]:
    """Yield the amplitude vector at t = 0, 1, ..., t_max.

    A single working buffer is updated in place and yielded each time;
    callers must copy it if they keep it past the next iteration.
    """
    check_dimensions(state, marked)
    t_max = _check_iterations(t_max, "t_max")
    buffer = state.amplitudes.copy()
    yield buffer
    for _ in _iterate(buffer, marked, t_max):
        yield buffer


def evolve(state: PureState, marked: MarkedSet, t: int) -> PureState:
    """Apply the Grover iteration t times; t = 0 returns the input.

    Memory stays O(N): one working buffer plus a temporary at each resync.
    """
    check_dimensions(state, marked)
    t = _check_iterations(t)
    if t == 0:
        return state
    logger.debug(f"Evolving n={state.n} register with r={marked.r} for {t} iterations")
    buffer = state.amplitudes.copy()
    for _ in _iterate(buffer, marked, t):
        pass
    return from_buffer(state.n, buffer)


def success_probability(state: PureState, marked: MarkedSet) -> float:
    """Total probability on the marked indices."""
    check_dimensions(state, marked)
    values = state.amplitudes[marked.index_array]
    return float(np.sum(values.real ** 2 + values.imag ** 2))


def trace_run(state: PureState, marked: MarkedSet, t_max: int) -> ProbabilityTrace:
    """Measure the evolving state at every t in [0, t_max].

    p_min/p_max are the bounds of the initial partition; kbar/lbar are the
    empirical means of the marked/unmarked amplitudes at time t.
    """
    stats = partition_stats(state, marked)
    p_min, p_max = probability_bounds(stats)
    mask = marked.mask
    unmarked_count = state.n_total - marked.r

    entries = []
    for t, buffer in enumerate(evolution_path(state, marked, t_max)):
        marked_values = buffer[mask]
        p_success = float(np.sum(marked_values.real ** 2 + marked_values.imag ** 2))
        kbar = complex(marked_values.sum() / marked.r)
        lbar = complex((buffer.sum() - marked_values.sum()) / unmarked_count) if unmarked_count else 0j
        entries.append(TraceEntry(t=t, p_success=p_success, p_min=p_min, p_max=p_max,
                                  kbar=kbar, lbar=lbar))
    logger.debug(f"Simulated trace with {len(entries)} entries")
    return ProbabilityTrace(entries=tuple(entries))
