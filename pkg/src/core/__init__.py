"""Register states, marked sets and their partition statistics."""
from .errors import GroverError
from .partition import PartitionStats, partition_stats
from .states import (
    MarkedSet,
    MixedEnsemble,
    PureState,
    basis_state,
    compensated_mean,
    from_buffer,
    global_mean,
    new_marked_set,
    new_mixed_ensemble,
    new_pure_state,
    uniform_state,
)

__all__ = [
    'GroverError',
    'PartitionStats', 'partition_stats',
    'MarkedSet', 'MixedEnsemble', 'PureState',
    'basis_state', 'compensated_mean', 'from_buffer', 'global_mean',
    'new_marked_set', 'new_mixed_ensemble', 'new_pure_state', 'uniform_state',
]
