"""Command-line entry point."""
import argparse
import sys
from pathlib import Path
from typing import IO, List, Optional

from pydantic import ValidationError

from src.cli.loaders import describe_validation_error
from src.cli.models import Command, OutputFormat, RunConfig
from src.cli.runner import CommandRunner
from src.core.errors import ContractViolation, GroverError, ParseError
from src.utils.config_loader import get_config

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_CONTRACT = 2


class _RaisingParser(argparse.ArgumentParser):
    """Argument errors become ParseError so they share exit code 1 with file errors."""

    def error(self, message):
        raise ParseError(message)


def _index_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _RaisingParser(
        prog="grover",
        description="Grover search with arbitrary initial states: simulator, closed form and averages.",
    )
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--state", dest="state_path", type=Path,
                        help="State JSON (ensemble JSON for mixed, bipartite JSON for bipartite)")
    parser.add_argument("--marked", type=_index_list, help="Marked indices, e.g. 3,7,12")
    parser.add_argument("--marked-file", type=Path, help="Marked set JSON {\"indices\": [...]}")
    parser.add_argument("--r", type=int, help="Number of marked states")
    parser.add_argument("--marked-seed", type=int, help="Sample the marked set with this seed (needs --r)")
    parser.add_argument("--n", type=int, help="Qubit count (optimal-tau)")
    parser.add_argument("--t-max", type=int, help="Last iteration emitted")
    parser.add_argument("--samples", type=int, help="Monte Carlo sample count")
    parser.add_argument("--seed", type=int, help="Monte Carlo seed")
    parser.add_argument("--epsilon", type=float, help="Pseudo-pure mixing parameter")
    parser.add_argument("--n-alice", type=int, help="Expected Alice qubit count (bipartite)")
    parser.add_argument("--k-bob", type=int, help="Expected Bob qubit count (bipartite)")
    parser.add_argument("--output", type=Path, help="Output file (default: standard output)")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat])
    parser.add_argument("--check", action="store_true", help="compare: exit 2 if the engines disagree")
    return parser


def parse_run_config(argv: Optional[List[str]] = None) -> RunConfig:
    """Parse arguments, fill defaults from the configuration and validate.

    Raises:
        ParseError: unknown or malformed arguments
        ValidationError: arguments that violate RunConfig
    """
    args = vars(build_parser().parse_args(argv))
    config = get_config()
    defaults = {
        "t_max": config.get('simulation.default_t_max', 10),
        "samples": config.get('averaging.default_samples', 5000),
        "seed": config.get('averaging.default_seed', 0),
        "format": config.get('output.format', 'csv'),
    }
    for key, value in defaults.items():
        if args[key] is None:
            args[key] = value
    return RunConfig(**{key: value for key, value in args.items() if value is not None})


def _report(error: Exception, stderr: IO[str]) -> None:
    message = describe_validation_error(error) if isinstance(error, ValidationError) else str(error)
    print(f"{type(error).__name__}: {message}", file=stderr)


def run(config: RunConfig, stdout: Optional[IO[str]] = None, stderr: Optional[IO[str]] = None) -> int:
    """Execute a validated request and return the process exit status."""
    stderr = stderr if stderr is not None else sys.stderr
    try:
        result = CommandRunner().execute(config, stdout)
    except ContractViolation as e:
        _report(e, stderr)
        return EXIT_CONTRACT
    except (GroverError, ValidationError) as e:
        _report(e, stderr)
        return EXIT_INVALID
    if result.failure is not None:
        _report(result.failure, stderr)
        return EXIT_CONTRACT
    return EXIT_OK


def main(argv: Optional[List[str]] = None, stdout: Optional[IO[str]] = None,
         stderr: Optional[IO[str]] = None) -> int:
    try:
        config = parse_run_config(argv)
    except (ParseError, ValidationError) as e:
        _report(e, stderr if stderr is not None else sys.stderr)
        return EXIT_INVALID
    return run(config, stdout, stderr)
