"""Birth–death chain for the Markovian queue with finite buffers.

With exponential interarrivals and patience the imbalance is a continuous
time Markov chain on ``{m_b, ..., m_s}``: up-moves at rate ``lam_s`` (below
``m_s``) plus ``|k| delta_b`` buyer abandonments when ``k < 0``, down-moves
at rate ``lam_b`` (above ``m_b``) plus ``k delta_s`` seller abandonments
when ``k > 0``.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import expm

from .simulator import BufferPolicy, QueueConfig


def _check_markovian(cfg: QueueConfig, policy: BufferPolicy) -> None:
    for name in ("interarrival_b", "interarrival_s", "patience_b", "patience_s"):
        if getattr(cfg, name).family != "exponential":
            raise ValueError(f"{name} must be exponential for the chain to be Markov")
    if policy.m_b is None or policy.m_s is None:
        raise ValueError("the chain needs finite buffers on both sides")
    if cfg.x0_count != 0:
        # initial customers never abandon, which the chain cannot represent
        raise ValueError("the chain oracle starts from an empty system")


def generator(cfg: QueueConfig, policy: BufferPolicy) -> tuple[np.ndarray, np.ndarray]:
    _check_markovian(cfg, policy)
    states = np.arange(policy.m_b, policy.m_s + 1)
    d_b = cfg.patience_b.delta
    d_s = cfg.patience_s.delta
    N = states.size
    Q = np.zeros((N, N))
    for i, k in enumerate(states):
        up = (cfg.lam_s if k < policy.m_s else 0.0) + (-k * d_b if k < 0 else 0.0)
        dn = (cfg.lam_b if k > policy.m_b else 0.0) + (k * d_s if k > 0 else 0.0)
        if i + 1 < N:
            Q[i, i + 1] = up
        if i > 0:
            Q[i, i - 1] = dn
        Q[i, i] = -(Q[i].sum())
    return states, Q


def transient_law(cfg: QueueConfig, policy: BufferPolicy, T: float) -> tuple[np.ndarray, np.ndarray]:
    """Law of ``X(T)`` started from 0."""
    states, Q = generator(cfg, policy)
    p0 = (states == 0).astype(float)
    return states, p0 @ expm(Q * T)


def cost_rates(cfg: QueueConfig, policy: BufferPolicy, states: np.ndarray) -> np.ndarray:
    """Expected scaled cost per unit time in each state."""
    pos = np.maximum(states, 0)
    neg = np.maximum(-states, 0)
    rate = (
        cfg.c_s * pos + cfg.c_b * neg
        + cfg.r_s * cfg.patience_s.delta * pos + cfg.r_b * cfg.patience_b.delta * neg
        + cfg.p_s * cfg.lam_s * (states == policy.m_s)
        + cfg.p_b * cfg.lam_b * (states == policy.m_b)
    )
    return rate / cfg.sqrt_n


def discounted_cost(cfg: QueueConfig, policy: BufferPolicy, T: float | None = None) -> float:
    """``E int_0^T e^{-alpha t} rate(X_t) dt`` from 0; ``T=None`` means the infinite horizon."""
    states, Q = generator(cfg, policy)
    r = cost_rates(cfg, policy, states)
    p0 = (states == 0).astype(float)
    N = states.size
    A = Q - cfg.alpha * np.eye(N)
    if T is None:
        return float(p0 @ np.linalg.solve(-A, r))
    # expm of [[A, r], [0, 0]] carries int_0^T e^{A s} ds r in its last column
    M = np.zeros((N + 1, N + 1))
    M[:N, :N] = A
    M[:N, N] = r
    return float(p0 @ expm(M * T)[:N, N])
