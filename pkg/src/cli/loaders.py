"""JSON input files parsed into domain types."""
import json
import logging
from pathlib import Path
from typing import List, Tuple, Type, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from src.cli.models import BipartiteFile, EnsembleFile, MarkedFile, StateFile
from src.core.errors import IoFailure, ParseError
from src.core.states import MarkedSet, MixedEnsemble, PureState, new_marked_set, new_mixed_ensemble, new_pure_state
from src.engine.mixed import BipartiteState, new_bipartite_state

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)


def _field_path(location: tuple) -> str:
    return ".".join(str(part) for part in location)


def describe_validation_error(error: ValidationError) -> str:
    """First pydantic error as ``field: message``."""
    first = error.errors()[0]
    if not first["loc"]:
        return first["msg"]
    return f"{_field_path(first['loc'])}: {first['msg']}"


def _read_model(path: Path, model: Type[ModelT]) -> ModelT:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e.strerror or e}") from e

    try:
        parsed = model.model_validate(data)
    except ValidationError as e:
        raise ParseError(f"{path}: {describe_validation_error(e)}") from e
    logger.debug(f"Parsed {model.__name__} from {path}")
    return parsed


def _to_complex(pairs: List[Tuple[float, float]]) -> np.ndarray:
    values = np.asarray(pairs, dtype=float).reshape(-1, 2)
    return values[:, 0] + 1j * values[:, 1]


def load_pure_state(path: Path) -> PureState:
    parsed = _read_model(path, StateFile)
    return new_pure_state(parsed.n, _to_complex(parsed.amplitudes))


def load_ensemble(path: Path) -> MixedEnsemble:
    parsed = _read_model(path, EnsembleFile)
    members = [(member.p, new_pure_state(parsed.n, _to_complex(member.amplitudes)))
               for member in parsed.members]
    return new_mixed_ensemble(parsed.n, members)


def load_marked_set(path: Path, n: int) -> MarkedSet:
    parsed = _read_model(path, MarkedFile)
    return new_marked_set(n, parsed.indices)


def load_bipartite(path: Path) -> BipartiteState:
    parsed = _read_model(path, BipartiteFile)
    return new_bipartite_state(parsed.n_alice, parsed.k_bob, _to_complex(parsed.amplitudes))
