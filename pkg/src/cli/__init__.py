"""Command-line front end."""
from src.cli.emit import emit_table, emit_trace, parse_trace_json
from src.cli.main import build_parser, main, run
from src.cli.models import Command, OutputFormat, RunConfig

__all__ = [
    "Command",
    "OutputFormat",
    "RunConfig",
    "build_parser",
    "emit_table",
    "emit_trace",
    "main",
    "parse_trace_json",
    "run",
]
