"""Diffusion scaling, offered waiting times and limit-theorem diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .simulator import QueueConfig, QueueTrajectory


@dataclass(frozen=True)
class ScaledTrajectory:
    grid: np.ndarray
    Xhat: np.ndarray
    Ghat_b: np.ndarray
    Ghat_s: np.ndarray
    Uhat_b: np.ndarray
    Uhat_s: np.ndarray
    Vhat_b: np.ndarray
    Vhat_s: np.ndarray

    def columns(self) -> dict[str, np.ndarray]:
        return {
            "t": self.grid, "Xhat": self.Xhat, "Ghat_b": self.Ghat_b, "Ghat_s": self.Ghat_s,
            "Uhat_b": self.Uhat_b, "Uhat_s": self.Uhat_s, "Vhat_b": self.Vhat_b, "Vhat_s": self.Vhat_s,
        }


def _at(traj: QueueTrajectory, grid: np.ndarray) -> np.ndarray:
    # row index of the right-continuous state at each grid time
    return np.searchsorted(traj.t, grid, side="right") - 1


def offered_wait(
    grid: np.ndarray,
    own_admitted: np.ndarray,
    own_departed: np.ndarray,
    other_arrivals: np.ndarray,
    other_waiting: np.ndarray,
) -> np.ndarray:
    """Wait of an infinitely patient customer arriving at each grid time.

    Zero when the other class is waiting.  Otherwise it is matched by the
    first opposite arrival after every own-class customer ahead of it has
    left, and those present at ``t`` are exactly the admitted ones with
    ``admitted <= t`` whose leaving epoch is the running maximum.  NaN
    where that arrival falls beyond the simulated horizon.
    """
    order = np.argsort(own_admitted, kind="stable")
    adm = own_admitted[order]
    if adm.size:
        runmax = np.maximum.accumulate(own_departed[order])
        k = np.searchsorted(adm, grid, side="right")
        ahead = np.where(k > 0, runmax[np.maximum(k - 1, 0)], -np.inf)
    else:
        ahead = np.full(grid.shape, -np.inf)
    clear = np.maximum(grid, ahead)
    out = np.full(grid.shape, np.nan)
    finite = np.isfinite(clear)
    j = np.searchsorted(other_arrivals, clear[finite], side="right")
    nxt = np.full(j.shape, np.nan)
    ok = j < other_arrivals.size
    nxt[ok] = other_arrivals[j[ok]]
    out[finite] = nxt - grid[finite]
    out[other_waiting] = 0.0
    return out


def scale_trajectory(cfg: QueueConfig, traj: QueueTrajectory, dt: float = 0.01, T: float | None = None) -> ScaledTrajectory:
    """Sample the ``sqrt(n)``-scaled processes on a uniform grid."""
    T = traj.T if T is None else min(T, traj.T)
    grid = dt * np.arange(int(math.floor(T / dt + 1e-9)) + 1)
    idx = _at(traj, grid)
    r = cfg.sqrt_n
    X = traj.X[idx]
    Vs = offered_wait(grid, traj.admitted_s, traj.departed_s, traj.arrivals_b, X < 0)
    Vb = offered_wait(grid, traj.admitted_b, traj.departed_b, traj.arrivals_s, X > 0)
    return ScaledTrajectory(
        grid=grid,
        Xhat=X / r,
        Ghat_b=traj.G_b[idx] / r,
        Ghat_s=traj.G_s[idx] / r,
        Uhat_b=traj.U_b[idx] / r,
        Uhat_s=traj.U_s[idx] / r,
        Vhat_b=r * Vb,
        Vhat_s=r * Vs,
    )


@dataclass(frozen=True)
class DiagnosticsReport:
    abandon_s: float
    abandon_b: float
    little_s: float
    little_b: float
    fluid_blocking: float

    @property
    def abandonment(self) -> float:
        return self.abandon_s + self.abandon_b

    @property
    def little(self) -> float:
        return self.little_s + self.little_b

    def as_dict(self) -> dict[str, float]:
        return {
            "abandon_s": self.abandon_s, "abandon_b": self.abandon_b,
            "little_s": self.little_s, "little_b": self.little_b,
            "fluid_blocking": self.fluid_blocking,
        }


def _occupation(traj: QueueTrajectory, grid: np.ndarray, part) -> np.ndarray:
    """Exact ``int_0^t part(X(s)) ds`` at each grid time."""
    v = part(traj.X).astype(float)
    cum = np.concatenate([[0.0], np.cumsum(v[:-1] * np.diff(traj.t))])
    idx = _at(traj, grid)
    return cum[idx] + v[idx] * (grid - traj.t[idx])


def diagnostics(cfg: QueueConfig, traj: QueueTrajectory, scaled: ScaledTrajectory | None = None) -> DiagnosticsReport:
    """Residuals of the abandonment-linearity and Little's-law relations, and fluid blocking."""
    s = scale_trajectory(cfg, traj) if scaled is None else scaled
    r = cfg.sqrt_n
    occ_s = _occupation(traj, s.grid, lambda x: np.maximum(x, 0)) / r
    occ_b = _occupation(traj, s.grid, lambda x: np.maximum(-x, 0)) / r
    ab_s = np.max(np.abs(s.Ghat_s - cfg.patience_s.hazard_at_zero * occ_s))
    ab_b = np.max(np.abs(s.Ghat_b - cfg.patience_b.hazard_at_zero * occ_b))
    li_s = np.nanmax(np.abs(np.maximum(s.Xhat, 0) - cfg.lambda0 * s.Vhat_s), initial=0.0)
    li_b = np.nanmax(np.abs(np.maximum(-s.Xhat, 0) - cfg.lambda0 * s.Vhat_b), initial=0.0)
    fluid = (traj.U_b[-1] + traj.U_s[-1]) / cfg.n
    return DiagnosticsReport(float(ab_s), float(ab_b), float(li_s), float(li_b), float(fluid))
