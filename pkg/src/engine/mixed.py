"""Search with mixed initial states, pseudo-pure states and partial registers.

Mixed states are kept as ensembles of pure states. Every quantity here is
linear in the ensemble, so O(members * N) work suffices and no N x N density
matrix is ever formed.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.core.errors import (
    DimensionMismatch,
    InconsistentStats,
    InvalidCount,
    InvalidEpsilon,
    LengthMismatch,
    NotNormalized,
)
from src.core.states import (
    NORM_TOLERANCE,
    MarkedSet,
    MixedEnsemble,
    PureState,
    basis_state,
    global_mean,
    new_mixed_ensemble,
    new_pure_state,
    uniform_state,
)
from src.engine.averaging import closed_average_from_weight
from src.engine.statevector import evolve, success_probability

logger = logging.getLogger(__name__)

# Bob components with |c_mu|^2 below this carry no weight and are dropped.
DROP_THRESHOLD = 1e-14
# Kept weights are renormalized only while the dropped mass stays below this.
RENORMALIZE_LIMIT = 1e-12
# Slack allowed on the Jensen inequality p_a >= p_ab.
GAP_TOLERANCE = 1e-12
EQUALITY_TOLERANCE = 1e-10


def _check_ensemble_marked(ens: MixedEnsemble, marked: MarkedSet) -> None:
    if ens.n != marked.n:
        raise DimensionMismatch(f"ensemble has n={ens.n} qubits but marked set has n={marked.n}")


def evolve_ensemble(ens: MixedEnsemble, marked: MarkedSet, t: int) -> MixedEnsemble:
    """rho(t) = Q^t rho Q^t-dagger, evolved member by member; weights are unchanged."""
    _check_ensemble_marked(ens, marked)
    return MixedEnsemble(n=ens.n, members=tuple((p, evolve(state, marked, t)) for p, state in ens.members))


def success_probability_mixed(ens: MixedEnsemble, marked: MarkedSet, t: int) -> float:
    """Weighted average of the members' success probabilities after t iterations."""
    _check_ensemble_marked(ens, marked)
    total = 0.0
    for p, state in ens.members:
        total += p * success_probability(evolve(state, marked, t), marked)
    return total


def mean_amplitude_sq_mixed(ens: MixedEnsemble) -> float:
    """Ensemble-averaged |abar|^2 = sum_mu p_mu |abar_mu|^2."""
    return math.fsum(p * abs(global_mean(state)) ** 2 for p, state in ens.members)


def average_success_mixed_closed(ens: MixedEnsemble, r: int, t: int) -> float:
    """Marked-set-averaged success probability of an ensemble, closed form with the r/N correction.

    Raises:
        InvalidCount: if r is outside [1, N] or t is negative
    """
    if isinstance(r, bool) or not isinstance(r, (int, np.integer)) or not 1 <= r <= ens.n_total:
        raise InvalidCount(f"need 1 <= r <= N={ens.n_total}, got r={r!r}")
    if t < 0:
        raise InvalidCount(f"t must be non-negative, got {t}")
    weight = ens.n_total * mean_amplitude_sq_mixed(ens)
    return closed_average_from_weight(weight, r, ens.n_total, t)


def max_success_fidelity(ens: MixedEnsemble) -> float:
    """<eta|rho|eta>, the squared fidelity with the equal superposition."""
    eta = uniform_state(ens.n).amplitudes
    return math.fsum(p * abs(complex(np.vdot(eta, state.amplitudes))) ** 2 for p, state in ens.members)


def maximally_mixed(n: int) -> MixedEnsemble:
    """I/N realized by the N computational basis states with weight 1/N each."""
    n_total = 1 << n
    return new_mixed_ensemble(n, [(1.0 / n_total, basis_state(n, i)) for i in range(n_total)])


def _check_epsilon(epsilon: float) -> float:
    if not 0.0 <= epsilon <= 1.0:
        raise InvalidEpsilon(f"epsilon must lie in [0, 1], got {epsilon!r}")
    return float(epsilon)


def pseudo_pure_ensemble(epsilon: float, psi: PureState) -> MixedEnsemble:
    """(1 - eps) I/N + eps |psi><psi| as an explicit ensemble; zero-weight members are left out."""
    epsilon = _check_epsilon(epsilon)
    n_total = psi.n_total
    members = []
    if epsilon < 1.0:
        members.extend(((1.0 - epsilon) / n_total, basis_state(psi.n, i)) for i in range(n_total))
    if epsilon > 0.0:
        members.append((epsilon, psi))
    return new_mixed_ensemble(psi.n, members)


def pseudo_pure_max(epsilon: float, psi: PureState) -> float:
    """P_max = (1 - eps)/N + eps N |abar_psi|^2."""
    epsilon = _check_epsilon(epsilon)
    n_total = psi.n_total
    return (1.0 - epsilon) / n_total + epsilon * n_total * abs(global_mean(psi)) ** 2


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Pure state of an (n_alice + k_bob)-qubit register, amplitudes b[mu, i] stored Bob-major."""

    n_alice: int
    k_bob: int
    amplitudes: np.ndarray

    @property
    def n_total(self) -> int:
        return 1 << self.n_alice

    @property
    def k_total(self) -> int:
        return 1 << self.k_bob

    @property
    def matrix(self) -> np.ndarray:
        """b as a (K, N) array: row mu is Bob's basis state |mu>."""
        return self.amplitudes.reshape(self.k_total, self.n_total)


def new_bipartite_state(n_alice: int, k_bob: int, amplitudes: Iterable[complex]) -> BipartiteState:
    """Validate a Bob-major amplitude sequence of length N*K.

    Raises:
        InvalidCount: qubit counts below 1
        LengthMismatch: wrong sequence length
        NotNormalized: squared norm off by more than 1e-8
    """
    for name, value in (("n_alice", n_alice), ("k_bob", k_bob)):
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
            raise InvalidCount(f"{name} must be an integer >= 1, got {value!r}")
    if not isinstance(amplitudes, np.ndarray):
        amplitudes = list(amplitudes)
    values = np.array(amplitudes, dtype=np.complex128)
    expected = 1 << (n_alice + k_bob)
    if values.ndim != 1 or values.size != expected:
        raise LengthMismatch(f"expected {expected} amplitudes for n_alice={n_alice}, k_bob={k_bob}, "
                             f"got shape {values.shape}")
    norm_sq = float(np.vdot(values, values).real)
    if not abs(norm_sq - 1.0) <= NORM_TOLERANCE:
        raise NotNormalized(f"sum of |b|^2 is {norm_sq!r}, expected 1 within {NORM_TOLERANCE}")
    values.setflags(write=False)
    return BipartiteState(n_alice=int(n_alice), k_bob=int(k_bob), amplitudes=values)


def extend_with_uniform_qubits(state: PureState, k_bob: int) -> BipartiteState:
    """|psi>_A tensor |eta>_B: k unentangled qubits in the equal superposition."""
    k_total = 1 << k_bob
    b = np.tile(state.amplitudes / math.sqrt(k_total), k_total)
    return new_bipartite_state(state.n, k_bob, b)


def bipartite_reduce(state: BipartiteState) -> MixedEnsemble:
    """Alice's reduced state Tr_B |psi><psi| as an ensemble over Bob's basis.

    Member mu has weight |c_mu|^2 = sum_i |b_mu,i|^2 and state a_mu = b_mu / c_mu.
    Members below 1e-14 in weight are dropped. The remaining weights are
    renormalized only when the dropped mass is below 1e-12; otherwise they keep
    their raw values and the ensemble check decides whether the loss is tolerable.
    """
    rows = state.matrix
    weights = np.einsum("ki,ki->k", rows.conj(), rows).real
    kept = weights >= DROP_THRESHOLD
    dropped_mass = math.fsum(weights[~kept])
    if dropped_mass < RENORMALIZE_LIMIT:
        total = math.fsum(weights[kept])
    else:
        logger.warning(f"Dropped Bob components carry weight {dropped_mass:.3g}; weights not renormalized")
        total = 1.0

    members = []
    for mu in np.flatnonzero(kept):
        c_mu = math.sqrt(weights[mu])
        members.append((float(weights[mu]) / total, new_pure_state(state.n_alice, rows[mu] / c_mu)))
    logger.debug(f"Reduced state has {len(members)} of {state.k_total} Bob components")
    return new_mixed_ensemble(state.n_alice, members)


class PartialSearchReport(BaseModel):
    """Leading-order success of a joint-register search versus Alice's reduced-register search."""
    model_config = ConfigDict(frozen=True)

    p_ab: float
    p_a: float
    gap: float
    jensen_equality: bool

    @model_validator(mode="after")
    def _finite(self):
        for name in ("p_ab", "p_a", "gap"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} is not finite")
        return self


def _jensen_gap(p_ab: float, p_a: float) -> float:
    """p_a - p_ab, which must not be negative beyond GAP_TOLERANCE."""
    gap = p_a - p_ab
    if not gap >= -GAP_TOLERANCE:
        raise InconsistentStats(f"partial-register gap {gap!r} is negative or not finite")
    return gap


def compare_partial_search(state: BipartiteState, r: int) -> PartialSearchReport:
    """P_max of the full NK search versus Alice's N search with her reduced state.

    With x_mu = c_mu abar_mu: p_ab = (N/K)|sum x_mu|^2 and p_a = N sum |x_mu|^2.

    Raises:
        InvalidCount: if r is outside [1, N]
        InconsistentStats: if p_ab disagrees with NK|bbar|^2, or p_a < p_ab beyond 1e-12
    """
    n_total, k_total = state.n_total, state.k_total
    if isinstance(r, bool) or not isinstance(r, (int, np.integer)) or not 1 <= r <= n_total:
        raise InvalidCount(f"need 1 <= r <= N={n_total}, got r={r!r}")

    x = state.matrix.sum(axis=1) / n_total
    p_ab = (n_total / k_total) * abs(complex(x.sum())) ** 2
    p_a = n_total * float(np.sum(np.abs(x) ** 2))

    bbar = complex(state.amplitudes.mean())
    joint = n_total * k_total * abs(bbar) ** 2
    if not abs(joint - p_ab) <= 1e-12:
        raise InconsistentStats(f"p_ab={p_ab!r} disagrees with NK|bbar|^2={joint!r}")

    equal = bool(np.max(np.abs(x - x[0])) <= EQUALITY_TOLERANCE)
    return PartialSearchReport(p_ab=p_ab, p_a=p_a, gap=_jensen_gap(p_ab, p_a), jensen_equality=equal)
