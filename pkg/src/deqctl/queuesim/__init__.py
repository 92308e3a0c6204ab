"""Pre-limit double-ended queue: simulation, scaling, costs and oracles."""
from .analysis import DiagnosticsReport, ScaledTrajectory, diagnostics, offered_wait, scale_trajectory
from .convergence import ConvergenceReport, convergence_study, markov_bridge
from .cost import estimate_qcp_cost, path_cost
from .distributions import Interarrival, Patience
from .simulator import BufferPolicy, QueueConfig, QueueTrajectory, simulate_queue

__all__ = [
    "BufferPolicy",
    "ConvergenceReport",
    "DiagnosticsReport",
    "Interarrival",
    "Patience",
    "QueueConfig",
    "QueueTrajectory",
    "ScaledTrajectory",
    "convergence_study",
    "diagnostics",
    "estimate_qcp_cost",
    "markov_bridge",
    "offered_wait",
    "path_cost",
    "scale_trajectory",
    "simulate_queue",
]
