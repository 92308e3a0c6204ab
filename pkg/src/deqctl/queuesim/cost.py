"""Discounted cost of the scaled queue along a simulated path."""
from __future__ import annotations

import math

import numpy as np

from ..diffusion import CostEstimate
from .simulator import ABANDON, BLOCKED, BUYER, SELLER, BufferPolicy, QueueConfig, QueueTrajectory, simulate_queue


def path_cost(cfg: QueueConfig, traj: QueueTrajectory, T_max: float | None = None) -> float:
    """Exact discounted cost of one trajectory on ``[0, T_max]``.

    Holding cost ``c_s X^+ + c_b X^-`` is constant between events and is
    integrated in closed form; every abandonment and blocking of a class
    is charged ``r`` resp. ``p`` discounted at its epoch.  All terms carry
    the ``1/sqrt(n)`` diffusion scaling.
    """
    a = cfg.alpha
    T = traj.T if T_max is None else min(T_max, traj.T)
    keep = traj.t <= T
    t = traj.t[keep]
    X = traj.X[keep].astype(float)
    ends = np.append(t[1:], T)
    rate = cfg.c_s * np.maximum(X, 0.0) + cfg.c_b * np.maximum(-X, 0.0)
    holding = np.sum(rate * (np.exp(-a * t) - np.exp(-a * ends))) / a

    ev = traj.event[keep]
    cl = traj.cls[keep]
    disc = np.exp(-a * t)
    jumps = (
        cfg.r_s * disc[(ev == ABANDON) & (cl == SELLER)].sum()
        + cfg.r_b * disc[(ev == ABANDON) & (cl == BUYER)].sum()
        + cfg.p_s * disc[(ev == BLOCKED) & (cl == SELLER)].sum()
        + cfg.p_b * disc[(ev == BLOCKED) & (cl == BUYER)].sum()
    )
    # initial removal sits in the counters' starting values
    jumps += cfg.p_s * traj.U_s[0] + cfg.p_b * traj.U_b[0]
    return float((holding + jumps) / cfg.sqrt_n)


def replicate_costs(
    cfg: QueueConfig, policy: BufferPolicy, reps: int, seed: int, T_max: float, on_path=None,
) -> np.ndarray:
    """Per-replication costs; ``on_path(rep, traj)`` sees every trajectory."""
    out = np.empty(reps)
    for r in range(reps):
        traj = simulate_queue(cfg, policy, T_max, seed, rep=r)
        out[r] = path_cost(cfg, traj, T_max)
        if on_path is not None:
            on_path(r, traj)
    return out


def qcp_tail_bound(cfg: QueueConfig, policy: BufferPolicy, T_max: float) -> float:
    """Discounted cost rate bound after ``T_max`` for finite buffers; ``inf`` otherwise.

    With finite buffers the scaled holding, abandonment and blocking rates
    are bounded by constants, so the tail is at most ``e^{-alpha T} rate / alpha``.
    """
    if policy.m_b is None or policy.m_s is None:
        return math.inf
    d_s = cfg.patience_s.hazard_at_zero if cfg.patience_s.family == "exponential" else math.inf
    d_b = cfg.patience_b.hazard_at_zero if cfg.patience_b.family == "exponential" else math.inf
    if math.isinf(d_s) or math.isinf(d_b):
        return math.inf
    top = max(policy.m_s, cfg.x0_count)
    bot = max(-policy.m_b, -cfg.x0_count)
    rate = (
        cfg.c_s * top + cfg.c_b * bot
        + cfg.r_s * d_s * top + cfg.r_b * d_b * bot
        + cfg.p_s * cfg.lam_s + cfg.p_b * cfg.lam_b
    ) / cfg.sqrt_n
    return math.exp(-cfg.alpha * T_max) * rate / cfg.alpha


def estimate_qcp_cost(
    cfg: QueueConfig, policy: BufferPolicy, reps: int, seed: int, T_max: float | None = None,
) -> CostEstimate:
    """Monte Carlo estimate of the scaled discounted queue cost."""
    T = 12.0 / cfg.alpha if T_max is None else float(T_max)
    costs = replicate_costs(cfg, policy, reps, seed, T)
    return CostEstimate(
        mean=float(np.mean(costs)),
        stderr=float(np.std(costs, ddof=1) / math.sqrt(reps)),
        reps=reps,
        T_max=T,
        tail_bound=qcp_tail_bound(cfg, policy, T),
    )
