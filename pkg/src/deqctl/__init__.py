"""Admission control for double-ended matching queues.

Solves the limiting singular control problem for the optimal blocking
thresholds and simulates both the reflected diffusion and the pre-limit
queue under threshold policies.
"""
from .params import ModelParams, Regime, classify_regime, mirror, thresholds
from .hjb import PolicySolution, SolverConfig, solve

__all__ = [
    "ModelParams",
    "Regime",
    "classify_regime",
    "mirror",
    "thresholds",
    "PolicySolution",
    "SolverConfig",
    "solve",
]

__version__ = "0.1.0"
