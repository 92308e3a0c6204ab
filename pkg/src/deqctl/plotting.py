"""Figures written next to the CSV outputs when ``--plot`` is given."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path: Path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _mark_barriers(ax, sol) -> None:
    for x, name in ((sol.a_star, "a*"), (sol.b_star, "b*")):
        if x is not None:
            ax.axvline(x, color="0.5", ls=":", lw=1)
            ax.annotate(name, (x, 1.0), xycoords=("data", "axes fraction"), ha="center", va="bottom", fontsize=8)


def plot_solution(sol, out: Path) -> list[Path]:
    p = sol.params
    paths = []
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(sol.W_curve.grid, sol.W_curve.y, lw=1.5)
    ax.axhline(p.p_s, color="C3", lw=0.8, ls="--", label="p_s")
    ax.axhline(-p.p_b, color="C2", lw=0.8, ls="--", label="-p_b")
    _mark_barriers(ax, sol)
    ax.set_xlabel("x")
    ax.set_ylabel("W = Q'")
    ax.set_title(f"{sol.regime}")
    ax.legend(frameon=False, fontsize=8)
    paths.append(out / "W.png")
    _save(fig, paths[-1])

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(sol.Q_curve.grid, sol.Q_curve.y, lw=1.5)
    _mark_barriers(ax, sol)
    ax.set_xlabel("x")
    ax.set_ylabel("Q")
    paths.append(out / "Q.png")
    _save(fig, paths[-1])
    return paths


def plot_sde_path(path, lo: float, hi: float, out: Path) -> Path:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 4.5), sharex=True)
    ax1.plot(path.grid, path.X, lw=0.6)
    for y in (lo, hi):
        if np.isfinite(y):
            ax1.axhline(y, color="0.4", ls=":", lw=1)
    ax1.set_ylabel("X")
    ax2.plot(path.grid, path.L_a, label="L_a")
    ax2.plot(path.grid, path.L_b, label="L_b")
    ax2.set_xlabel("t")
    ax2.set_ylabel("local time")
    ax2.legend(frameon=False, fontsize=8)
    target = out / "path.png"
    _save(fig, target)
    return target


def plot_scaled(scaled, out: Path) -> Path:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 4.5), sharex=True)
    ax1.step(scaled.grid, scaled.Xhat, where="post", lw=0.7)
    ax1.set_ylabel("scaled imbalance")
    ax2.plot(scaled.grid, scaled.Ghat_s + scaled.Ghat_b, label="abandonments")
    ax2.plot(scaled.grid, scaled.Uhat_s + scaled.Uhat_b, label="blockings")
    ax2.set_xlabel("t")
    ax2.legend(frameon=False, fontsize=8)
    target = out / "scaled.png"
    _save(fig, target)
    return target


def plot_convergence(report, out: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    labels = sorted({r.label for r in report.rows})
    for label in labels:
        rows = [r for r in report.rows if r.label == label]
        ns = [r.n for r in rows]
        ax.errorbar(ns, [r.mean for r in rows], yerr=[3 * r.stderr for r in rows], label=label, capsize=2, marker="o", ms=3)
    ax.axhline(report.value, color="k", lw=0.8, ls="--", label="V(x)")
    ax.set_xscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("scaled cost")
    ax.legend(frameon=False, fontsize=7)
    target = out / "convergence.png"
    _save(fig, target)
    return target
