"""Error hierarchy shared by every module.

Validation failures also derive from ``ValueError`` so callers that only know
the standard exceptions still catch them. ``ContractViolation`` marks a broken
numerical contract rather than bad input.
"""


class GroverError(Exception):
    """Base class for all toolkit errors."""


class LengthMismatch(GroverError, ValueError):
    """Amplitude sequence length differs from 2**n."""


class NotNormalized(GroverError, ValueError):
    """Squared amplitudes (or weights) do not sum to one within tolerance."""


class DimensionMismatch(GroverError, ValueError):
    """Two inputs refer to registers of different size."""


class InvalidMarkedSet(GroverError, ValueError):
    """Marked indices are empty, duplicated or out of range."""


class InvalidCount(GroverError, ValueError):
    """A count (r, t, samples, qubits) is outside its admissible range."""


class FrameMismatch(GroverError, ValueError):
    """A four-dimensional frame is used with data it was not built from."""


class FullyMarked(GroverError, ValueError):
    """Operation needs a nonempty unmarked set but r == N."""


class ComplexAmplitudes(GroverError, ValueError):
    """A real-amplitude-only operation received complex amplitudes."""


class BudgetExceeded(GroverError, ValueError):
    """Exact enumeration would exceed the configured subset budget."""


class InvalidEpsilon(GroverError, ValueError):
    """Pseudo-pure mixing parameter outside [0, 1]."""


class ParseError(GroverError, ValueError):
    """Input file could not be parsed into the expected schema."""


class IoFailure(GroverError, OSError):
    """Reading or writing an artifact failed."""


class ContractViolation(GroverError):
    """A numerical invariant does not hold."""


class InconsistentStats(ContractViolation, ValueError):
    """Derived quantities fall outside their admissible range beyond tolerance."""


class CheckFailed(ContractViolation):
    """Cross-engine residual above threshold."""
