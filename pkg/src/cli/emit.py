"""CSV and JSON emission of traces and result tables."""
import json
from typing import IO, Any, Dict, List

import numpy as np
import pandas as pd

from src.cli.models import OutputFormat
from src.core.errors import InvalidCount, IoFailure, ParseError
from src.engine.trace import ProbabilityTrace, TraceEntry

TRACE_COLUMNS = ["t", "p_success", "p_min", "p_max", "kbar_re", "kbar_im", "lbar_re", "lbar_im"]
FLOAT_FORMAT = "%.17g"


def trace_to_frame(trace: ProbabilityTrace) -> pd.DataFrame:
    rows = [
        (e.t, e.p_success, e.p_min, e.p_max, e.kbar.real, e.kbar.imag, e.lbar.real, e.lbar.imag)
        for e in trace.entries
    ]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def _plain(value: Any) -> Any:
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and np.isnan(value):
        return None
    return value


def _records(frame: pd.DataFrame) -> List[Dict[str, Any]]:
    columns = list(frame.columns)
    return [{column: _plain(value) for column, value in zip(columns, row)}
            for row in frame.itertuples(index=False, name=None)]


def emit_table(frame: pd.DataFrame, fmt: OutputFormat, sink: IO[str], key: str = "rows") -> None:
    """Write a result table.

    CSV uses a header row and 17 significant digits; JSON is ``{key: [row, ...]}``
    with shortest round-trip floats.
    """
    try:
        if fmt is OutputFormat.CSV:
            frame.to_csv(sink, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        else:
            json.dump({key: _records(frame)}, sink)
            sink.write("\n")
    except OSError as e:
        raise IoFailure(f"cannot write output: {e.strerror or e}") from e


def emit_trace(trace: ProbabilityTrace, fmt: OutputFormat, sink: IO[str]) -> None:
    """Serialize a non-empty trace with the fixed column names."""
    if len(trace) == 0:
        raise InvalidCount("cannot emit an empty trace")
    emit_table(trace_to_frame(trace), fmt, sink, key="entries")


def parse_trace_json(text: str) -> ProbabilityTrace:
    """Inverse of the JSON form of ``emit_trace``."""
    try:
        rows = json.loads(text)["entries"]
        entries = tuple(
            TraceEntry(
                t=int(row["t"]),
                p_success=float(row["p_success"]),
                p_min=float(row["p_min"]),
                p_max=float(row["p_max"]),
                kbar=complex(row["kbar_re"], row["kbar_im"]),
                lbar=complex(row["lbar_re"], row["lbar_im"]),
            )
            for row in rows
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ParseError(f"malformed trace JSON: {e}") from e
    return ProbabilityTrace(entries=entries)
