"""Command dispatch: every command is a thin call into the engine modules."""
import json
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import IO, Callable, Dict, Iterator, Optional

import numpy as np
import pandas as pd

from src.cli.emit import emit_table, emit_trace
from src.cli.loaders import load_bipartite, load_ensemble, load_marked_set, load_pure_state
from src.cli.models import Command, OutputFormat, RunConfig
from src.core.errors import CheckFailed, InvalidMarkedSet, IoFailure, ParseError
from src.core.partition import partition_stats
from src.core.states import MarkedSet, new_marked_set
from src.engine.algebraic import (
    optimal_iterations,
    reconstruct_state,
    rotation_angle,
    success_probability_closed,
    trace_closed,
)
from src.engine.averaging import (
    average_success_closed,
    average_success_exact,
    average_success_mc,
    sample_marked_set,
)
from src.engine.mixed import (
    average_success_mixed_closed,
    compare_partial_search,
    max_success_fidelity,
    pseudo_pure_ensemble,
    pseudo_pure_max,
    success_probability_mixed,
)
from src.engine.special_cases import classify, cylinder_geometry, cylinder_trajectory
from src.engine.statevector import evolution_path, trace_run
from src.engine.trace import ProbabilityTrace
from src.utils.config_loader import ConfigLoader, get_config
from src.utils.logger import setup_logger


@dataclass
class CommandResult:
    """What a command produced: a trace, a table or a bare text line."""
    trace: Optional[ProbabilityTrace] = None
    table: Optional[pd.DataFrame] = None
    text: Optional[str] = None
    failure: Optional[CheckFailed] = None


class CommandRunner:
    """Run one validated ``RunConfig`` and write its artifact."""

    def __init__(self, config: Optional[ConfigLoader] = None):
        """Initialize the runner.

        Args:
            config: Configuration to use (defaults to the global instance)
        """
        self.config = config or get_config()
        self.logger = setup_logger(
            "src",
            log_file=self.config.get('logging.file'),
            level=self.config.get('logging.level', 'WARNING'),
            max_bytes=self.config.get('logging.max_bytes', 10485760),
            backup_count=self.config.get('logging.backup_count', 5),
        )
        self.handlers: Dict[Command, Callable[[RunConfig], CommandResult]] = {
            Command.SIMULATE: self._simulate,
            Command.CLOSED_FORM: self._closed_form,
            Command.COMPARE: self._compare,
            Command.AVERAGE: self._average,
            Command.MIXED: self._mixed,
            Command.BIPARTITE: self._bipartite,
            Command.PSEUDO_PURE: self._pseudo_pure,
            Command.CLASSIFY: self._classify,
            Command.CYLINDER: self._cylinder,
            Command.OPTIMAL_TAU: self._optimal_tau,
        }

    def execute(self, run_config: RunConfig, stdout: Optional[IO[str]] = None) -> CommandResult:
        """Run the command and write its output; a failed ``--check`` is returned, not raised."""
        self.logger.info(f"Running {run_config.command.value}")
        result = self.handlers[run_config.command](run_config)
        with self._sink(run_config, stdout) as sink:
            if result.trace is not None:
                emit_trace(result.trace, run_config.format, sink)
            elif result.table is not None:
                emit_table(result.table, run_config.format, sink)
            else:
                sink.write(result.text)
        if run_config.output is not None:
            self.logger.info(f"Wrote {run_config.command.value} output to {run_config.output}")
        return result

    @contextmanager
    def _sink(self, run_config: RunConfig, stdout: Optional[IO[str]]) -> Iterator[IO[str]]:
        if run_config.output is None:
            yield stdout if stdout is not None else sys.stdout
            return
        try:
            handle = open(run_config.output, "w", encoding="utf-8", newline="")
        except OSError as e:
            raise IoFailure(f"cannot open {run_config.output}: {e.strerror or e}") from e
        with handle:
            yield handle

    # Inputs

    def _marked_set(self, run_config: RunConfig, n: int) -> MarkedSet:
        if run_config.marked is not None:
            return new_marked_set(n, run_config.marked)
        if run_config.marked_file is not None:
            return load_marked_set(run_config.marked_file, n)
        marked = sample_marked_set(n, run_config.r, run_config.marked_seed)
        self.logger.info(f"Sampled marked set {list(marked.indices)} (seed={run_config.marked_seed})")
        return marked

    def _state_and_marked(self, run_config: RunConfig):
        state = load_pure_state(run_config.state_path)
        return state, self._marked_set(run_config, state.n)

    # Commands

    def _simulate(self, run_config: RunConfig) -> CommandResult:
        state, marked = self._state_and_marked(run_config)
        return CommandResult(trace=trace_run(state, marked, run_config.t_max))

    def _closed_form(self, run_config: RunConfig) -> CommandResult:
        state, marked = self._state_and_marked(run_config)
        return CommandResult(trace=trace_closed(state, marked, run_config.t_max))

    def _compare(self, run_config: RunConfig) -> CommandResult:
        state, marked = self._state_and_marked(run_config)
        stats = partition_stats(state, marked)
        omega = rotation_angle(state.n_total, marked.r)
        mask = marked.mask

        rows = []
        for t, buffer in enumerate(evolution_path(state, marked, run_config.t_max)):
            values = buffer[mask]
            p_simulated = float(np.sum(values.real ** 2 + values.imag ** 2))
            p_closed = success_probability_closed(stats, omega, t)
            if marked.is_full:
                state_residual = math.nan
            else:
                rebuilt = reconstruct_state(state, marked, t).amplitudes
                state_residual = float(np.max(np.abs(rebuilt - buffer)))
            rows.append((t, p_simulated, p_closed, abs(p_simulated - p_closed), state_residual))
        table = pd.DataFrame(rows, columns=["t", "p_simulated", "p_closed", "p_residual", "state_residual"])

        failure = None
        if run_config.check:
            failure = self._check_residuals(table)
        return CommandResult(table=table, failure=failure)

    def _check_residuals(self, table: pd.DataFrame) -> Optional[CheckFailed]:
        p_tol = self.config.get('compare.probability_tolerance', 1e-12)
        s_tol = self.config.get('compare.state_tolerance', 1e-10)
        worst_p = float(table["p_residual"].max())
        worst_s = float(table["state_residual"].max()) if table["state_residual"].notna().any() else 0.0
        if worst_p > p_tol:
            return CheckFailed(f"p_residual: max {worst_p:.3g} exceeds {p_tol:g}")
        if worst_s > s_tol:
            return CheckFailed(f"state_residual: max {worst_s:.3g} exceeds {s_tol:g}")
        self.logger.info(f"Engines agree: p_residual <= {worst_p:.3g}, state_residual <= {worst_s:.3g}")
        return None

    def _average(self, run_config: RunConfig) -> CommandResult:
        state = load_pure_state(run_config.state_path)
        r = run_config.r
        budget = self.config.get('averaging.enumeration_budget', 10 ** 6)
        enumerate_exactly = math.comb(state.n_total, r) <= budget
        if not enumerate_exactly:
            self.logger.info(f"C({state.n_total}, {r}) exceeds budget {budget}; skipping enumeration")

        rows = []
        for t in range(run_config.t_max + 1):
            estimates = []
            if enumerate_exactly:
                estimates.append(average_success_exact(state, r, t, budget))
            estimates.append(average_success_mc(state, r, t, run_config.samples, run_config.seed))
            for estimate in estimates:
                rows.append((t, estimate.method.value, estimate.value, estimate.std_error, estimate.samples))
            rows.append((t, "closed_form", average_success_closed(state, r, t), 0.0, 0))
        return CommandResult(table=pd.DataFrame(rows, columns=["t", "method", "value", "std_error", "samples"]))

    def _mixed(self, run_config: RunConfig) -> CommandResult:
        ens = load_ensemble(run_config.state_path)
        marked = self._marked_set(run_config, ens.n)
        p_max = max_success_fidelity(ens)
        rows = [
            (t, success_probability_mixed(ens, marked, t), average_success_mixed_closed(ens, marked.r, t), p_max)
            for t in range(run_config.t_max + 1)
        ]
        return CommandResult(table=pd.DataFrame(
            rows, columns=["t", "p_success", "p_average_closed", "p_max_fidelity"]))

    def _bipartite(self, run_config: RunConfig) -> CommandResult:
        state = load_bipartite(run_config.state_path)
        for field, given, actual in (("n_alice", run_config.n_alice, state.n_alice),
                                     ("k_bob", run_config.k_bob, state.k_bob)):
            if given is not None and given != actual:
                raise ParseError(f"{field}: --{field.replace('_', '-')} {given} disagrees with file value {actual}")
        report = compare_partial_search(state, run_config.r)
        return CommandResult(table=pd.DataFrame([report.model_dump()],
                                                columns=["p_ab", "p_a", "gap", "jensen_equality"]))

    def _pseudo_pure(self, run_config: RunConfig) -> CommandResult:
        psi = load_pure_state(run_config.state_path)
        epsilon = run_config.epsilon
        p_max = pseudo_pure_max(epsilon, psi)
        p_max_ensemble = max_success_fidelity(pseudo_pure_ensemble(epsilon, psi))
        return CommandResult(table=pd.DataFrame([(epsilon, p_max, p_max_ensemble)],
                                                columns=["epsilon", "p_max", "p_max_ensemble"]))

    def _classify(self, run_config: RunConfig) -> CommandResult:
        state, marked = self._state_and_marked(run_config)
        label = classify(state, marked)
        row = {"kind": label.kind.value, **label.witness.model_dump()}
        row["radius"], row["length"] = math.nan, math.nan
        if marked.r == 1 and float(np.max(np.abs(state.amplitudes.imag))) <= 1e-12:
            geometry = cylinder_geometry(state, marked.indices[0])
            row["radius"], row["length"] = geometry.radius, geometry.length
        return CommandResult(table=pd.DataFrame([row]))

    def _cylinder(self, run_config: RunConfig) -> CommandResult:
        state, marked = self._state_and_marked(run_config)
        if marked.r != 1:
            raise InvalidMarkedSet(f"marked: cylinder needs exactly one marked index, got {marked.r}")
        points = cylinder_trajectory(state, marked.indices[0], run_config.t_max)
        return CommandResult(table=pd.DataFrame([point.model_dump() for point in points],
                                                columns=["t", "radius", "axis", "eta_u", "eta_m"]))

    def _optimal_tau(self, run_config: RunConfig) -> CommandResult:
        n_total = 1 << run_config.n
        tau = optimal_iterations(n_total, run_config.r)
        if run_config.format is OutputFormat.CSV:
            return CommandResult(text=f"{tau}\n")
        return CommandResult(text=json.dumps({"n_total": n_total, "r": run_config.r, "tau": tau}) + "\n")
