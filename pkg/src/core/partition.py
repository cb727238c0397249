"""Partition statistics of a state with respect to a marked set."""
from dataclasses import dataclass

import numpy as np

from src.core.states import MarkedSet, PureState, check_dimensions, global_mean


@dataclass(frozen=True)
class PartitionStats:
    """Marked-subspace probability and the three mean amplitudes.

    Attributes:
        p0: Initial success probability, sum of |a_m|^2 over marked indices
        abar_m: Mean amplitude of the marked states
        abar_u: Mean amplitude of the unmarked states (0 when every index is marked)
        abar: Mean over all N amplitudes
        r: Number of marked states
        n_total: Register dimension N
    """

    p0: float
    abar_m: complex
    abar_u: complex
    abar: complex
    r: int
    n_total: int

    @property
    def fully_marked(self) -> bool:
        return self.r == self.n_total


def partition_stats(state: PureState, marked: MarkedSet) -> PartitionStats:
    """Compute P0 and the marked/unmarked/global mean amplitudes by direct summation.

    Raises:
        DimensionMismatch: if state and marked set disagree on n
    """
    check_dimensions(state, marked)
    amplitudes = state.amplitudes
    mask = marked.mask
    r = marked.r
    n_total = state.n_total

    marked_values = amplitudes[mask]
    p0 = float(np.sum(marked_values.real ** 2 + marked_values.imag ** 2))
    abar_m = complex(marked_values.sum() / r)
    if r == n_total:
        abar_u = 0j
    else:
        abar_u = complex(amplitudes[~mask].sum() / (n_total - r))

    return PartitionStats(
        p0=p0,
        abar_m=abar_m,
        abar_u=abar_u,
        abar=global_mean(state),
        r=r,
        n_total=n_total,
    )
