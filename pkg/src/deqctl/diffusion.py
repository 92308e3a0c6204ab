"""Reflected diffusion under barrier policies and Monte Carlo discounted costs.

The controlled state is simulated with a projected Euler–Maruyama scheme:
an unconstrained Gaussian step followed by a clamp onto the active
barriers.  The clamp amounts are the local-time (blocking) increments.
Each replication draws its normals from its own Philox stream keyed by
``(seed, replication)``, so the k-th normal of a stream is the k-th step's
increment regardless of batching.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hjb import PolicySolution
from .params import ModelParams, Regime

_BATCH = 1000


@dataclass(frozen=True)
class SdePath:
    grid: np.ndarray
    X: np.ndarray
    L_a: np.ndarray
    L_b: np.ndarray


@dataclass(frozen=True)
class CostEstimate:
    mean: float
    stderr: float
    reps: int
    T_max: float
    tail_bound: float

    def __post_init__(self) -> None:
        if self.reps < 2:
            raise ValueError("a cost estimate needs at least 2 replications")
        if not (self.stderr >= 0 and self.tail_bound >= 0):
            raise ValueError("stderr and tail_bound must be non-negative")


@dataclass(frozen=True)
class MCConfig:
    reps: int = 10_000
    dt: float = 1e-3
    T_max: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.reps < 2:
            raise ValueError("reps must be >= 2")
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.T_max is not None and not self.T_max > 0:
            raise ValueError("T_max must be > 0")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")

    def horizon(self, p: ModelParams) -> float:
        return 12.0 / p.alpha if self.T_max is None else float(self.T_max)


def rng_for(seed: int, rep: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(rep)])))


def policy_barriers(sol: PolicySolution) -> tuple[float, float]:
    """Active (lower, upper) barriers of a policy; missing sides are infinite."""
    lo = -math.inf if sol.a_star is None else sol.a_star
    hi = math.inf if sol.b_star is None else sol.b_star
    if sol.regime is Regime.ZERO_CONTROL:
        lo, hi = -math.inf, math.inf
    return lo, hi


def _drift(p: ModelParams, x: np.ndarray) -> np.ndarray:
    return p.beta - np.where(x > 0, p.delta_s * x, p.delta_b * x)


def _cost_rate(p: ModelParams, x: np.ndarray) -> np.ndarray:
    return np.where(x > 0, p.theta_s * x, -p.theta_b * x)


def euler_on_increments(p: ModelParams, lo: float, hi: float, x0: float, dt: float, dB: np.ndarray):
    """Projected Euler on given Brownian increments.

    ``dB`` has shape ``(..., n_steps)``; returns ``X, L_a, L_b`` with one
    more column than ``dB`` (the first column is the post-jump start).
    """
    dB = np.asarray(dB, dtype=float)
    shape = dB.shape[:-1]
    n = dB.shape[-1]
    X = np.empty(shape + (n + 1,))
    La = np.empty_like(X)
    Lb = np.empty_like(X)
    x = np.full(shape, min(max(x0, lo), hi))
    la = np.full(shape, max(lo - x0, 0.0))
    lb = np.full(shape, max(x0 - hi, 0.0))
    X[..., 0], La[..., 0], Lb[..., 0] = x, la, lb
    sigma = p.sigma
    for k in range(n):
        xt = x + _drift(p, x) * dt + sigma * dB[..., k]
        push_up = np.maximum(lo - xt, 0.0)
        push_dn = np.maximum(xt - hi, 0.0)
        x = xt + push_up - push_dn
        la = la + push_up
        lb = lb + push_dn
        X[..., k + 1], La[..., k + 1], Lb[..., k + 1] = x, la, lb
    return X, La, Lb


def simulate_reflected(
    p: ModelParams, sol: PolicySolution, x0: float, T: float, dt: float, seed: int, rep: int = 0,
) -> SdePath:
    """One path of the controlled diffusion under ``sol``'s barrier policy."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    n = int(round(T / dt))
    lo, hi = policy_barriers(sol)
    dB = math.sqrt(dt) * rng_for(seed, rep).standard_normal(n)
    X, La, Lb = euler_on_increments(p, lo, hi, x0, dt, dB)
    return SdePath(dt * np.arange(n + 1), X, La, Lb)


def tail_bound(p: ModelParams, lo: float, hi: float, x0: float, T: float) -> float:
    """Upper bound on the discounted cost accrued after ``T``.

    Two barriers: bounded state plus Ito on ``(x-a)^2 / (2(b-a))`` for
    each local time.  Otherwise the second moment grows at most linearly,
    ``E X_t^2 <= x^2 + K t`` with ``K = sigma^2 + beta^2 / delta_min``.
    """
    a = p.alpha
    e = math.exp(-a * T)
    if math.isfinite(lo) and math.isfinite(hi):
        width = hi - lo
        c_max = max(p.theta_s * max(hi, 0.0), p.theta_b * max(-lo, 0.0))
        drift = max(abs(p.beta - p.delta_b * min(lo, 0.0) - p.delta_s * max(lo, 0.0)),
                    abs(p.beta - p.delta_s * max(hi, 0.0) - p.delta_b * min(hi, 0.0)))
        per_push = width / 2.0 + (drift + p.sigma2 / (2.0 * width)) / a
        return e * (c_max / a + (p.p_s + p.p_b) * per_push)
    x = abs(min(max(x0, lo), hi))
    K = p.sigma2 + p.beta ** 2 / min(p.delta_b, p.delta_s)
    rootT = math.sqrt(T)
    # int_T^inf e^{-a t} E|X_t| dt, with sqrt(t) <= sqrt(T) + (t - T) / (2 sqrt(T))
    abs_int = e * (x / a + math.sqrt(K) * (rootT / a + 1.0 / (2.0 * a * a * rootT)))
    bound = max(p.theta_s, p.theta_b) * abs_int
    if math.isfinite(lo) or math.isfinite(hi):
        pen = p.p_b if math.isfinite(lo) else p.p_s
        push = e * (x + math.sqrt(K * T)) + (a + max(p.delta_b, p.delta_s)) * abs_int + abs(p.beta) * e / a
        bound += pen * push
    return bound


def _batch_costs(p, lo, hi, x0, dt, n, seed, reps_slice) -> np.ndarray:
    reps = list(reps_slice)
    sq = math.sqrt(dt)
    Z = np.stack([rng_for(seed, r).standard_normal(n) for r in reps])
    m = len(reps)
    x = np.full(m, min(max(x0, lo), hi))
    cost = np.full(m, p.p_b * max(lo - x0, 0.0) + p.p_s * max(x0 - hi, 0.0))
    disc = np.exp(-p.alpha * dt * np.arange(n))
    sigma = p.sigma
    two_sided = math.isfinite(lo) or math.isfinite(hi)
    for k in range(n):
        d = disc[k]
        cost += d * dt * _cost_rate(p, x)
        xt = x + _drift(p, x) * dt + sigma * sq * Z[:, k]
        if two_sided:
            up = np.maximum(lo - xt, 0.0)
            dn = np.maximum(xt - hi, 0.0)
            x = xt + up - dn
            cost += d * (p.p_b * up + p.p_s * dn)
        else:
            x = xt
    return cost


def estimate_dcp_cost(
    p: ModelParams,
    sol: PolicySolution,
    x0: float,
    cfg: MCConfig,
    barriers: tuple[float, float] | None = None,
) -> CostEstimate:
    """Monte Carlo estimate of the discounted cost from ``x0``.

    ``barriers`` overrides the policy's (lower, upper) barriers, which is
    how perturbed policies are probed on common random numbers.
    """
    lo, hi = policy_barriers(sol) if barriers is None else barriers
    if not lo < hi:
        raise ValueError("need lower barrier < upper barrier")
    T = cfg.horizon(p)
    n = int(round(T / cfg.dt))
    costs = np.concatenate([
        _batch_costs(p, lo, hi, x0, cfg.dt, n, cfg.seed, range(s, min(s + _BATCH, cfg.reps)))
        for s in range(0, cfg.reps, _BATCH)
    ])
    return CostEstimate(
        mean=float(np.mean(costs)),
        stderr=float(np.std(costs, ddof=1) / math.sqrt(cfg.reps)),
        reps=cfg.reps,
        T_max=T,
        tail_bound=tail_bound(p, lo, hi, x0, T),
    )
