"""Reflection (Skorokhod) maps on paths sampled on a uniform grid.

A :class:`Path` is read as a right-continuous step function, so the sup/inf
expressions in the explicit reflection formulas reduce to running scans over
the grid values.  All maps return a :class:`Decomposition`
``phi = psi + eta_l - eta_r`` with non-decreasing pushing terms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

_GRID_RTOL = 1e-12


@dataclass(frozen=True)
class Path:
    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("path values must be a non-empty 1-D sequence")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.size)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.values.size - 1)

    def like(self, values) -> "Path":
        return Path(self.t0, self.dt, np.asarray(values, dtype=float))

    def aligned_with(self, other: "Path") -> bool:
        return (
            len(self) == len(other)
            and math.isclose(self.dt, other.dt, rel_tol=_GRID_RTOL)
            and math.isclose(self.t0, other.t0, rel_tol=_GRID_RTOL, abs_tol=_GRID_RTOL * self.dt)
        )

    @classmethod
    def from_function(cls, f, t0: float, t1: float, n: int) -> "Path":
        dt = (t1 - t0) / (n - 1)
        t = t0 + dt * np.arange(n)
        return cls(t0, dt, np.asarray(f(t), dtype=float))


@dataclass(frozen=True)
class Decomposition:
    phi: Path
    eta_l: Path
    eta_r: Path


def _split_pushing(psi: Path, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``phi - psi`` into lower/upper pushing by the sign of each increment.

    On a grid each step pushes against at most one barrier, so positive
    increments belong to the lower barrier and negative ones to the upper.
    """
    eta = phi - psi.values
    d = np.diff(eta, prepend=0.0)
    return np.cumsum(np.maximum(d, 0.0)), np.cumsum(np.maximum(-d, 0.0))


def reflect_one_sided(psi: Path, a: float) -> Decomposition:
    """Lower reflection at ``a``: ``phi(t) = psi(t) + sup_{s<=t} (a - psi(s))^+``."""
    push = np.maximum.accumulate(np.maximum(a - psi.values, 0.0))
    phi = psi.values + push
    return Decomposition(psi.like(phi), psi.like(push), psi.like(np.zeros(len(psi))))


def _lambda_push(g: np.ndarray, a: float, b: float) -> np.ndarray:
    # z_k = sup_{s<=k} min((g_s - b)^+, min_{u in [s,k]} (g_u - a)), evaluated in one pass
    out = np.empty_like(g)
    z = -math.inf
    for k, gk in enumerate(g.tolist()):
        up = gk - b
        if up < 0.0:
            up = 0.0
        if up > z:
            z = up
        lo = gk - a
        if lo < z:
            z = lo
        out[k] = z
    return out


def reflect_two_sided(psi: Path, a: float, b: float) -> Decomposition:
    """Reflection on ``[a, b]`` through the composition ``Lambda_{a,b} o Gamma_a``."""
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    g = reflect_one_sided(psi, a).phi.values
    phi = g - _lambda_push(g, a, b)
    # guard against round-off leaking past the barriers
    phi = np.clip(phi, a, b)
    eta_l, eta_r = _split_pushing(psi, phi)
    return Decomposition(psi.like(phi), psi.like(eta_l), psi.like(eta_r))


def reflect_time_varying(psi: Path, l: Path, r: Path) -> Decomposition:
    """Reflection between moving barriers ``l(t) <= phi(t) <= r(t)``.

    Uses ``phi = psi - Theta`` with ``Theta = max(b, h)``, where
    ``b(t) = min((psi(0) - r(0))^+, inf_{u<=t} (psi - l)(u))`` and
    ``h(t) = sup_{s<=t} min((psi - r)(s), inf_{u in [s,t]} (psi - l)(u))``.
    """
    if not (psi.aligned_with(l) and psi.aligned_with(r)):
        raise ValueError("psi, l and r must share the same grid")
    gap = r.values - l.values
    if not gap.min() > 0.0:
        raise ValueError(f"barriers must satisfy inf(r - l) > 0, got {gap.min()}")
    lo = (psi.values - l.values).tolist()
    hi = (psi.values - r.values).tolist()
    theta = np.empty(len(psi))
    bk = min(max(hi[0], 0.0), lo[0])
    hk = -math.inf
    for k in range(len(lo)):
        if lo[k] < bk:
            bk = lo[k]
        if hi[k] > hk:
            hk = hi[k]
        if lo[k] < hk:
            hk = lo[k]
        theta[k] = bk if bk > hk else hk
    phi = psi.values - theta
    phi = np.minimum(np.maximum(phi, l.values), r.values)
    eta_l, eta_r = _split_pushing(psi, phi)
    return Decomposition(psi.like(phi), psi.like(eta_l), psi.like(eta_r))


def _index_window(f: Path, t1: float, t2: float) -> tuple[int, int]:
    if t1 > t2:
        raise ValueError(f"need t1 <= t2, got [{t1}, {t2}]")
    tol = _GRID_RTOL * max(1.0, abs(f.t_end))
    if t1 < f.t0 - tol or t2 > f.t_end + tol:
        raise ValueError(f"window [{t1}, {t2}] outside path domain [{f.t0}, {f.t_end}]")
    # the step function takes value f_k on [t_k, t_{k+1})
    i = int(math.floor((t1 - f.t0) / f.dt + 1e-9))
    j = int(math.floor((t2 - f.t0) / f.dt + 1e-9))
    return max(i, 0), min(j, len(f) - 1)


def oscillation(f: Path, t1: float, t2: float) -> float:
    """``sup |f(t) - f(s)|`` over ``s, t`` in ``[t1, t2]``."""
    i, j = _index_window(f, t1, t2)
    seg = f.values[i : j + 1]
    return float(seg.max() - seg.min())


def modulus(f: Path, delta: float, T: float | None = None) -> float:
    """Modulus of continuity ``sup{|f(t) - f(s)| : |t - s| < delta, s, t <= T}``.

    For a step function, values ``k`` cells apart are reachable with
    ``|t - s| < delta`` as long as ``k < delta/dt + 1``.
    """
    if not delta > 0:
        raise ValueError(f"delta must be > 0, got {delta}")
    if T is None:
        T = f.t_end
    _, j = _index_window(f, f.t0, T)
    v = f.values[: j + 1]
    ratio = delta / f.dt
    lag = int(round(ratio)) if abs(ratio - round(ratio)) < 1e-9 else int(math.ceil(ratio))
    lag = min(lag, v.size - 1)
    if lag <= 0:
        return 0.0
    w = sliding_window_view(v, lag + 1)
    return float((w.max(axis=1) - w.min(axis=1)).max())
