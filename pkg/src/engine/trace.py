"""Per-iteration probability records shared by both engines."""
from dataclasses import dataclass
from typing import Tuple

from src.core.errors import InconsistentStats, InvalidCount


@dataclass(frozen=True)
class TraceEntry:
    t: int
    p_success: float
    p_min: float
    p_max: float
    kbar: complex
    lbar: complex


@dataclass(frozen=True)
class ProbabilityTrace:
    """Ordered trace entries, t = 0, 1, 2, ..."""

    entries: Tuple[TraceEntry, ...]

    def __post_init__(self):
        for position, entry in enumerate(self.entries):
            if entry.t != position:
                raise InvalidCount(f"trace entry {position} has t={entry.t}; t must count up from 0")
            if not -1e-12 <= entry.p_success <= 1.0 + 1e-12:
                raise InconsistentStats(f"p_success={entry.p_success!r} at t={entry.t} outside [0, 1]")

    def __len__(self) -> int:
        return len(self.entries)

    def column(self, name: str) -> list:
        return [getattr(entry, name) for entry in self.entries]
