"""Simulation and closed-form analysis engines."""
from .algebraic import FourDFrame, FourDVector, build_frame, decompose, optimal_iterations, rotation_angle
from .statevector import evolve, grover_step, success_probability, trace_run
from .trace import ProbabilityTrace, TraceEntry

__all__ = [
    'FourDFrame', 'FourDVector', 'build_frame', 'decompose', 'optimal_iterations', 'rotation_angle',
    'evolve', 'grover_step', 'success_probability', 'trace_run',
    'ProbabilityTrace', 'TraceEntry',
]
