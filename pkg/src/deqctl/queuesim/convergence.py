"""Cost of translated threshold policies across system sizes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..hjb import PolicySolution, solve
from ..params import ModelParams
from .analysis import diagnostics
from .cost import replicate_costs
from .distributions import Interarrival, Patience
from .simulator import BufferPolicy, QueueConfig


def markov_bridge(p: ModelParams, n: int, x0_hat: float = 0.0) -> QueueConfig:
    """Markovian queue whose diffusion limit is ``p``.

    Poisson arrivals at ``lambda0 = sigma^2/2`` per class with the drift
    split evenly, ``beta_s = -beta_b = beta/2``; exponential patience with
    rates ``delta``; each ``theta`` is split half into holding cost and half
    into abandonment penalty, ``c = theta/2`` and ``r = theta/(2 delta)``.
    """
    return QueueConfig(
        n=n,
        lambda0=0.5 * p.sigma2,
        beta_b=-0.5 * p.beta,
        beta_s=0.5 * p.beta,
        interarrival_b=Interarrival("exponential"),
        interarrival_s=Interarrival("exponential"),
        patience_b=Patience("exponential", delta=p.delta_b),
        patience_s=Patience("exponential", delta=p.delta_s),
        c_b=0.5 * p.theta_b,
        c_s=0.5 * p.theta_s,
        r_b=0.5 * p.theta_b / p.delta_b,
        r_s=0.5 * p.theta_s / p.delta_s,
        p_b=p.p_b,
        p_s=p.p_s,
        alpha=p.alpha,
        x0_hat=x0_hat,
    )


@dataclass(frozen=True)
class PolicyRow:
    n: int
    label: str
    m_b: int | None
    m_s: int | None
    mean: float
    stderr: float
    gap: float


@dataclass
class ConvergenceReport:
    value: float
    solution: PolicySolution
    rows: list[PolicyRow] = field(default_factory=list)
    diagnostics: dict[int, dict[str, float]] = field(default_factory=dict)

    def row(self, n: int, label: str) -> PolicyRow:
        for r in self.rows:
            if r.n == n and r.label == label:
                return r
        raise KeyError((n, label))


PERTURBATIONS = {
    "a-0.1": (-0.1, 0.0),
    "a+0.1": (0.1, 0.0),
    "b-0.1": (0.0, -0.1),
    "b+0.1": (0.0, 0.1),
}


def _policies(sol: PolicySolution, n: int) -> dict[str, BufferPolicy]:
    a, b = sol.a_star, sol.b_star
    out = {"threshold": BufferPolicy.from_barriers(a, b, n)}
    for label, (da, db) in PERTURBATIONS.items():
        aa = None if a is None else min(a + da, -1e-12)
        bb = None if b is None else max(b + db, 1e-12)
        out[label] = BufferPolicy.from_barriers(aa, bb, n)
    out["zero"] = BufferPolicy()
    return out


def convergence_study(
    p: ModelParams,
    bridge: QueueConfig,
    n_list,
    reps: int,
    seed: int,
    T_max: float | None = None,
    sol: PolicySolution | None = None,
) -> ConvergenceReport:
    """Scaled costs of the translated threshold policy and its neighbours.

    Every policy at a given ``n`` runs on the same ``(seed, rep)`` streams.
    Diagnostics are replication averages over the threshold-policy paths.
    """
    if sol is None:
        sol = solve(p)
    T = 12.0 / p.alpha if T_max is None else float(T_max)
    value = sol.value(bridge.x0_hat)
    report = ConvergenceReport(value=value, solution=sol)
    for n in n_list:
        cfg = bridge.with_n(int(n))
        diag_sum: dict[str, float] = {}

        def collect(rep, traj, cfg=cfg, acc=diag_sum):
            for k, v in diagnostics(cfg, traj).as_dict().items():
                acc[k] = acc.get(k, 0.0) + v

        for label, pol in _policies(sol, cfg.n).items():
            costs = replicate_costs(cfg, pol, reps, seed, T, on_path=collect if label == "threshold" else None)
            mean = float(np.mean(costs))
            report.rows.append(PolicyRow(
                n=cfg.n, label=label, m_b=pol.m_b, m_s=pol.m_s, mean=mean,
                stderr=float(np.std(costs, ddof=1) / math.sqrt(reps)), gap=abs(mean - value),
            ))
        d = {k: v / reps for k, v in diag_sum.items()}
        d["abandonment"] = d["abandon_s"] + d["abandon_b"]
        d["little"] = d["little_s"] + d["little_b"]
        report.diagnostics[cfg.n] = d
    return report


def combined_stderr(*errs: float) -> float:
    return math.sqrt(sum(e * e for e in errs))
