"""Pydantic models for input files and the run configuration."""
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Command(str, Enum):
    """Command enumeration."""
    SIMULATE = "simulate"
    CLOSED_FORM = "closed-form"
    COMPARE = "compare"
    AVERAGE = "average"
    MIXED = "mixed"
    BIPARTITE = "bipartite"
    PSEUDO_PURE = "pseudo-pure"
    CLASSIFY = "classify"
    CYLINDER = "cylinder"
    OPTIMAL_TAU = "optimal-tau"


class OutputFormat(str, Enum):
    """Output format enumeration."""
    CSV = "csv"
    JSON = "json"


# Commands that evolve or analyse a state against a concrete marked set.
MARKED_SET_COMMANDS = {
    Command.SIMULATE, Command.CLOSED_FORM, Command.COMPARE,
    Command.MIXED, Command.CLASSIFY, Command.CYLINDER,
}
COUNT_COMMANDS = {Command.AVERAGE, Command.BIPARTITE, Command.OPTIMAL_TAU}
# optimal-tau is analytic; past this the register size no longer fits a float.
MAX_QUBITS = 1000


class StrictModel(BaseModel):
    """Base for file schemas: unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid")


class StateFile(StrictModel):
    """Pure state file: {"n": int, "amplitudes": [[re, im], ...]}."""
    n: int = Field(..., ge=1)
    amplitudes: List[Tuple[float, float]]


class EnsembleMember(StrictModel):
    """One weighted member of an ensemble file."""
    p: float
    amplitudes: List[Tuple[float, float]]


class EnsembleFile(StrictModel):
    """Ensemble file: {"n": int, "members": [{"p": real, "amplitudes": [...]}, ...]}."""
    n: int = Field(..., ge=1)
    members: List[EnsembleMember]


class MarkedFile(StrictModel):
    """Marked set file: {"indices": [int, ...]}."""
    indices: List[int]


class BipartiteFile(StrictModel):
    """Bipartite state file, amplitudes in Bob-major order (index mu * N + i)."""
    n_alice: int = Field(..., ge=1)
    k_bob: int = Field(..., ge=1)
    amplitudes: List[Tuple[float, float]]


class RunConfig(StrictModel):
    """Validated command-line request."""
    command: Command
    state_path: Optional[Path] = Field(None, description="State, ensemble or bipartite JSON file")
    marked: Optional[List[int]] = Field(None, description="Explicit marked indices")
    marked_file: Optional[Path] = Field(None, description="Marked set JSON file")
    r: Optional[int] = Field(None, ge=1, description="Number of marked states")
    marked_seed: Optional[int] = Field(None, ge=0, description="Seed for sampling the marked set")
    n: Optional[int] = Field(None, ge=1, le=MAX_QUBITS, description="Qubit count (optimal-tau)")
    t_max: int = Field(10, ge=0)
    samples: int = Field(5000, ge=2)
    seed: int = Field(0, ge=0)
    epsilon: Optional[float] = None
    n_alice: Optional[int] = Field(None, ge=1)
    k_bob: Optional[int] = Field(None, ge=1)
    output: Optional[Path] = Field(None, description="Output file; standard output when unset")
    format: OutputFormat = OutputFormat.CSV
    check: bool = False

    @model_validator(mode="after")
    def _command_requirements(self):
        command = self.command
        if command is not Command.OPTIMAL_TAU and self.state_path is None:
            raise ValueError(f"state_path: --state is required for {command.value}")

        if command in MARKED_SET_COMMANDS:
            explicit = (self.marked is not None) + (self.marked_file is not None)
            sampled = self.marked_seed is not None
            if explicit + sampled != 1:
                raise ValueError("marked: give exactly one of --marked, --marked-file or --r with --marked-seed")
            if sampled and self.r is None:
                raise ValueError("r: --marked-seed requires --r")

        if command in COUNT_COMMANDS and self.r is None:
            raise ValueError(f"r: --r is required for {command.value}")
        if command is Command.OPTIMAL_TAU and self.n is None:
            raise ValueError("n: --n is required for optimal-tau")
        if command is Command.PSEUDO_PURE and self.epsilon is None:
            raise ValueError("epsilon: --epsilon is required for pseudo-pure")
        if self.check and command is not Command.COMPARE:
            raise ValueError("check: --check only applies to compare")
        return self
