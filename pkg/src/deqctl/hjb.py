"""Free-boundary construction of the value function for the diffusion control problem.

``W = Q'`` solves the piecewise-linear ODE

    (sigma^2/2) W'' + (beta - h(x)) W' - (alpha + h'(x)) W + C'(x) = 0,   x != 0,

and the optimal barriers are located by shooting: ``W_a`` starts from
``W_a(a) = -p_b, W_a'(a) = 0`` and is continued through the origin.  The
separatrix ``c`` splits starting points whose curves blow up from those whose
curves turn over; for ``a`` in ``(c, 0)`` the height ``M(a)`` of the unique
interior maximum decreases from ``T_s`` to ``-p_b``, and ``M(a*) = p_s`` fixes
both barriers.  Regimes with a single barrier reuse ``c``; the right-barrier
regime is obtained by mirroring ``x -> -x``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .params import (
    ModelParams,
    Regime,
    classify_regime,
    drift_h,
    holding_cost_C,
    mirror,
)


class SolverError(RuntimeError):
    """Base class for failures of the HJB construction."""


class IntegrationError(SolverError):
    def __init__(self, msg: str, x: float):
        super().__init__(f"{msg} (at x={x:.12g})")
        self.x = x


class BracketError(SolverError):
    pass


class NoInteriorMax(SolverError):
    pass


class ShootingError(SolverError):
    pass


class Tail(enum.Enum):
    DIVERGES_UP = "DivergesUp"
    DIVERGES_DOWN = "DivergesDown"
    BOUNDED = "Bounded"


@dataclass(frozen=True)
class SolverConfig:
    x_max: float
    x_min: float
    ode_tol: float = 1e-10
    W_big: float = 100.0
    bisect_tol: float = 1e-6
    max_iter: int = 100
    grid_step: float = 1e-3
    q_pad: float = 2.0

    def __post_init__(self) -> None:
        if not self.x_min < 0.0 < self.x_max:
            raise ValueError(f"need x_min < 0 < x_max, got ({self.x_min}, {self.x_max})")
        for name in ("ode_tol", "W_big", "bisect_tol", "grid_step", "q_pad"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    @classmethod
    def default_for(cls, p: ModelParams, **overrides) -> "SolverConfig":
        span = max(10.0, 10.0 * (abs(p.beta) + 1.0) / min(p.delta_b, p.delta_s))
        base = dict(
            x_max=span,
            x_min=-span,
            W_big=50.0 * max(p.T_s, p.T_b, 1.0),
        )
        base.update(overrides)
        return cls(**base)

    def validate_for(self, p: ModelParams) -> None:
        if not self.W_big > max(p.T_s, p.T_b, p.p_s, p.p_b):
            raise ValueError("W_big must exceed max(T_s, T_b, p_s, p_b)")

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class Curve:
    """Tabulated function with its derivative.

    For a W-curve ``y`` holds ``W`` and ``dy`` holds ``W'``; for a Q-curve
    ``y`` is ``Q`` and ``dy`` is ``Q' = W``.
    """

    grid: np.ndarray
    y: np.ndarray
    dy: np.ndarray

    def __post_init__(self) -> None:
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or g.size < 2 or not np.all(np.diff(g) > 0):
            raise ValueError("curve grid must be strictly increasing with >= 2 nodes")
        y = np.asarray(self.y, dtype=float)
        dy = np.asarray(self.dy, dtype=float)
        if y.shape != g.shape or dy.shape != g.shape:
            raise ValueError("curve values must match the grid length")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "dy", dy)

    def __call__(self, x):
        return CubicHermiteSpline(self.grid, self.y, self.dy, extrapolate=False)(x)

    def derivative(self, x):
        return CubicHermiteSpline(self.grid, self.y, self.dy, extrapolate=False).derivative()(x)

    def index_of(self, x: float) -> int:
        i = int(np.argmin(np.abs(self.grid - x)))
        if abs(self.grid[i] - x) > 1e-12 * max(1.0, abs(x)):
            raise KeyError(f"{x} is not a grid node")
        return i


@dataclass(frozen=True)
class PolicySolution:
    regime: Regime
    params: ModelParams
    W_curve: Curve
    Q_curve: Curve
    a_star: float | None = None
    b_star: float | None = None
    c: float | None = None
    k_s: float | None = None
    k_b: float | None = None
    info: dict = field(default_factory=dict, compare=False)

    @property
    def barriers(self) -> tuple[float | None, float | None]:
        return self.a_star, self.b_star

    def value(self, x: float) -> float:
        """Q(x), extended linearly beyond the tabulated range."""
        g = self.Q_curve.grid
        if x < g[0]:
            return float(self.Q_curve.y[0] + self.Q_curve.dy[0] * (x - g[0]))
        if x > g[-1]:
            return float(self.Q_curve.y[-1] + self.Q_curve.dy[-1] * (x - g[-1]))
        return float(self.Q_curve(x))


# --------------------------------------------------------------------------
# ODE right-hand sides
# --------------------------------------------------------------------------

def _rhs_left(p: ModelParams, homogeneous: bool = False):
    k = 2.0 / p.sigma2
    lam = p.alpha + p.delta_b
    src = 0.0 if homogeneous else p.theta_b

    def f(x, y):
        return [y[1], k * (lam * y[0] + src - (p.beta - p.delta_b * x) * y[1])]

    return f


def _rhs_right(p: ModelParams, homogeneous: bool = False):
    k = 2.0 / p.sigma2
    lam = p.alpha + p.delta_s
    src = 0.0 if homogeneous else p.theta_s

    def f(x, y):
        return [y[1], k * (lam * y[0] - src - (p.beta - p.delta_s * x) * y[1])]

    return f


def ode_residual(p: ModelParams, x, W, Wp, Wpp):
    """Residual of the W-equation at points away from the origin."""
    x = np.asarray(x, dtype=float)
    gamma = np.where(x < 0, p.delta_b, p.delta_s)
    dC = np.where(x < 0, -p.theta_b, p.theta_s)
    return 0.5 * p.sigma2 * Wpp + (p.beta - drift_h(p, x)) * Wp - (p.alpha + gamma) * W + dC


def _ivp(f, x0, x1, y0, cfg: SolverConfig, events=None, dense=True):
    sol = solve_ivp(
        f, (x0, x1), y0, method="RK45", rtol=cfg.ode_tol, atol=cfg.ode_tol * 1e-2,
        events=events, dense_output=dense,
    )
    if sol.status == -1:
        raise IntegrationError(f"integrator failed: {sol.message}", float(sol.t[-1]))
    return sol


@dataclass
class _Shot:
    a: float
    left: object
    right: object
    x_end: float
    tail: Tail
    r_max: float | None
    M: float | None


def _big_event(W_big: float):
    def ev(x, y):
        return abs(y[0]) - W_big

    ev.terminal = True
    return ev


def _max_event(x, y):
    return y[1]


_max_event.direction = -1


def _tail_of(w_end: float, cfg: SolverConfig) -> Tail:
    if w_end >= cfg.W_big * (1 - 1e-9):
        return Tail.DIVERGES_UP
    if w_end <= -cfg.W_big * (1 - 1e-9):
        return Tail.DIVERGES_DOWN
    return Tail.BOUNDED


def _shoot(a: float, p: ModelParams, cfg: SolverConfig, x_max: float | None = None) -> _Shot:
    if not a < 0:
        raise ValueError(f"starting point a must be < 0, got {a}")
    x_max = cfg.x_max if x_max is None else x_max
    left = _ivp(_rhs_left(p), a, 0.0, [-p.p_b, 0.0], cfg, events=[_big_event(cfg.W_big)])
    if left.t_events[0].size:
        # escaped before reaching the origin
        return _Shot(a, left, None, float(left.t[-1]), _tail_of(float(left.y[0, -1]), cfg), None, None)
    y0 = left.y[:, -1]
    right = _ivp(_rhs_right(p), 0.0, x_max, y0, cfg, events=[_big_event(cfg.W_big), _max_event])
    r_max = M = None
    hits = right.t_events[1]
    if hits.size:
        r_max = float(hits[0])
        M = float(right.y_events[1][0][0])
    return _Shot(a, left, right, float(right.t[-1]), _tail_of(float(right.y[0, -1]), cfg), r_max, M)


def _nodes(x0: float, x1: float, h: float) -> np.ndarray:
    n = max(1, int(math.ceil((x1 - x0) / h - 1e-9)))
    return np.linspace(x0, x1, n + 1)


def integrate_Wa(a: float, p: ModelParams, cfg: SolverConfig) -> Curve:
    """Tabulate ``W_a`` on ``[a, x_end]``; the origin is a node whenever the shot reaches it."""
    shot = _shoot(a, p, cfg)
    if shot.right is None:
        xl = _nodes(a, shot.x_end, cfg.grid_step)
        yl = shot.left.sol(xl)
        return Curve(xl, yl[0], yl[1])
    xl = _nodes(a, 0.0, cfg.grid_step)
    xr = _nodes(0.0, shot.x_end, cfg.grid_step)
    yl = shot.left.sol(xl)
    yr = shot.right.sol(xr)
    return Curve(
        np.concatenate([xl, xr[1:]]),
        np.concatenate([yl[0], yr[0, 1:]]),
        np.concatenate([yl[1], yr[1, 1:]]),
    )


def classify_tail(curve: Curve, p: ModelParams, cfg: SolverConfig) -> Tail:
    w_end = curve.y[-1]
    if w_end >= cfg.W_big * (1 - 1e-9) and curve.dy[-1] > 0:
        return Tail.DIVERGES_UP
    if w_end <= -cfg.W_big * (1 - 1e-9):
        return Tail.DIVERGES_DOWN
    return Tail.BOUNDED


def _is_up(a: float, p: ModelParams, cfg: SolverConfig) -> bool:
    # a bounded tail has measure zero in a; it sides with the down branch
    return _shoot(a, p, cfg).tail is Tail.DIVERGES_UP


def _bracket_c(p: ModelParams, cfg: SolverConfig) -> tuple[float, float]:
    """Return ``(a_up, a_down)`` with ``a_up < c < a_down`` and width <= bisect_tol."""
    a_down = -10.0 * cfg.bisect_tol
    if _is_up(a_down, p, cfg):
        raise BracketError(f"W_a does not turn down for a={a_down}; is p_b < T_b?")
    a_up = -1.0
    while not _is_up(a_up, p, cfg):
        a_down = a_up
        a_up *= 2.0
        if a_up < -64.0:
            raise BracketError(
                "no diverging-up starting point found down to a=-64; "
                "increase W_big or x_max"
            )
    for _ in range(cfg.max_iter):
        if a_down - a_up <= cfg.bisect_tol:
            break
        mid = 0.5 * (a_up + a_down)
        if _is_up(mid, p, cfg):
            a_up = mid
        else:
            a_down = mid
    if a_down - a_up <= cfg.bisect_tol:
        if _shoot(a_down, p, cfg).tail is Tail.BOUNDED:
            # the down side never separated from the up side within the horizon
            raise BracketError(f"shots near the separatrix stay bounded up to x_max={cfg.x_max}; increase x_max")
        return a_up, a_down
    raise ShootingError(f"separatrix bisection did not reach width {cfg.bisect_tol} in {cfg.max_iter} steps")


def _root(f, lo: float, hi: float, xtol: float, maxiter: int, what: str) -> float:
    try:
        return brentq(f, lo, hi, xtol=xtol, rtol=xtol, maxiter=maxiter)
    except RuntimeError as exc:
        raise ShootingError(f"{what}: {exc}") from None


def find_c(p: ModelParams, cfg: SolverConfig) -> float:
    """Separatrix ``c``: the largest ``a`` whose curve ``W_a`` escapes to ``+inf``."""
    cfg.validate_for(p)
    a_up, a_down = _bracket_c(p, cfg)
    return 0.5 * (a_up + a_down)


def max_of_Wa(a: float, p: ModelParams, cfg: SolverConfig) -> tuple[float, float]:
    """Height ``M(a)`` and location ``r_a`` of the interior maximum of ``W_a``."""
    x_max = cfg.x_max
    for _ in range(6):
        shot = _shoot(a, p, cfg, x_max)
        if shot.r_max is not None and shot.r_max < 0.9 * x_max:
            return shot.M, shot.r_max
        if shot.tail is Tail.DIVERGES_UP and shot.r_max is None:
            break
        x_max *= 2.0
    raise NoInteriorMax(f"W_a has no interior maximum for a={a} (a outside (c, 0)?)")


def _M_minus(a: float, p: ModelParams, cfg: SolverConfig) -> float:
    try:
        M, _ = max_of_Wa(a, p, cfg)
    except NoInteriorMax:
        return math.inf
    return M - p.p_s


def _find_barriers(p: ModelParams, cfg: SolverConfig, a_down: float) -> tuple[float, float]:
    lo = a_down
    hi = -1e-9
    f_lo = _M_minus(lo, p, cfg)
    step = cfg.bisect_tol
    # a_down sits just right of c, where M(a) is close to T_s > p_s
    while not f_lo > 0:
        lo -= step
        step *= 2.0
        f_lo = _M_minus(lo, p, cfg)
        if step > 1.0:
            raise BracketError("could not bracket M(a) = p_s to the right of c")
    if not _M_minus(hi, p, cfg) < 0:
        raise BracketError("M(a) does not fall below p_s as a -> 0-")
    a_star = _root(lambda a: _M_minus(a, p, cfg), lo, hi, 1e-14, cfg.max_iter, "barrier search")
    M, b_star = max_of_Wa(a_star, p, cfg)
    if abs(M - p.p_s) > cfg.bisect_tol:
        raise SolverError(f"barrier search stalled: |M(a*) - p_s| = {abs(M - p.p_s):.3g}")
    return a_star, b_star


def find_barriers(p: ModelParams, cfg: SolverConfig) -> tuple[float, float]:
    """Optimal two-sided barriers ``(a*, b*)`` with ``M(a*) = p_s`` and ``b* = r_{a*}``."""
    cfg.validate_for(p)
    _, a_down = _bracket_c(p, cfg)
    return _find_barriers(p, cfg, a_down)


# --------------------------------------------------------------------------
# Decaying homogeneous solutions and the unconstrained benchmark
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _Decaying:
    sol: object
    scale: float

    def __call__(self, x):
        return self.sol(x) / self.scale

    @property
    def slope0(self) -> float:
        return float(self(0.0)[1])


def decaying_solution(p: ModelParams, cfg: SolverConfig, x_hi: float) -> _Decaying:
    """Bounded solution of the right homogeneous equation, normalised to 1 at 0.

    Integrated backwards from far out, where the unbounded companion
    solution is damped; the start slope is the leading-order tail
    ``u'/u = -(alpha + delta_s)/(delta_s x - beta)``.
    """
    X = max(x_hi, cfg.x_max, (abs(p.beta) + 1.0) / p.delta_s * 10.0) + 5.0
    rho = -(p.alpha + p.delta_s) / (p.delta_s * X - p.beta)
    sol = _ivp(_rhs_right(p, homogeneous=True), X, 0.0, [1.0, rho], cfg)
    u0 = float(sol.y[0, -1])
    return _Decaying(sol.sol, u0)


def _homogeneous_shot_up(p: ModelParams, cfg: SolverConfig, slope: float) -> bool:
    """Whether the shot ``u(0) = 1, u'(0) = slope`` escapes to ``+inf`` (rather than crossing 0)."""

    def crossed(x, y):
        return y[0]

    crossed.terminal = True
    sol = _ivp(_rhs_right(p, homogeneous=True), 0.0, cfg.x_max, [1.0, slope], cfg,
               events=[_big_event(1e6), crossed], dense=False)
    if sol.t_events[1].size:
        return False
    return sol.y[0, -1] > 0


def decaying_slope_by_shooting(p: ModelParams, cfg: SolverConfig, rel_tol: float = 1e-10) -> float:
    """``Psi_0'(0+)`` found by bisecting the initial slope of ``u(0) = 1`` shots.

    Too steep a slope sends the shot below zero, too shallow sends it to
    ``+inf``; the decaying solution is the separatrix between the two.
    """
    hi = 0.0
    lo = -1.0
    while _homogeneous_shot_up(p, cfg, lo):
        lo *= 2.0
        if lo < -1e6:
            raise ShootingError("decaying-slope bisection could not bracket")
    if not _homogeneous_shot_up(p, cfg, hi):
        raise ShootingError("decaying-slope bisection could not bracket")
    while hi - lo > rel_tol * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if _homogeneous_shot_up(p, cfg, mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _confirm_separatrix(p: ModelParams, cfg: SolverConfig, slope: float, rel: float = 1e-6) -> None:
    # a slightly steeper start must cross zero and a slightly shallower one must blow up
    if _homogeneous_shot_up(p, cfg, slope * (1 + rel)) or not _homogeneous_shot_up(p, cfg, slope * (1 - rel)):
        raise ShootingError(
            f"shots at slope {slope:.12g} * (1 +- {rel:g}) do not bracket the decaying solution"
        )


def solve_zero_control(p: ModelParams, cfg: SolverConfig) -> tuple[Curve, float, float]:
    """Bounded increasing ``W`` with ``W(-inf) = -T_b`` and ``W(+inf) = T_s``.

    ``W = k_b Phi_0 - T_b`` on the left and ``k_s Psi_0 + T_s`` on the right,
    with ``k_s, k_b`` fixed by C^1 pasting at the origin.
    """
    psi0 = decaying_solution(p, cfg, cfg.x_max)
    phi0 = decaying_solution(mirror(p), cfg, -cfg.x_min)
    d_psi = psi0.slope0
    d_phi = -phi0.slope0
    _confirm_separatrix(p, cfg, d_psi)
    _confirm_separatrix(mirror(p), cfg, -d_phi)
    if not (d_psi < 0 < d_phi):
        raise ShootingError("decaying solutions have the wrong monotonicity")
    ratio = d_psi / d_phi
    k_s = -(p.T_s + p.T_b) / (1.0 - ratio)
    k_b = k_s * ratio

    xl = _nodes(cfg.x_min, 0.0, cfg.grid_step)
    xr = _nodes(0.0, cfg.x_max, cfg.grid_step)
    ul = phi0(-xl)
    ur = psi0(xr)
    W = np.concatenate([k_b * ul[0] - p.T_b, k_s * ur[0, 1:] + p.T_s])
    Wp = np.concatenate([-k_b * ul[1], k_s * ur[1, 1:]])
    return Curve(np.concatenate([xl, xr[1:]]), W, Wp), k_s, k_b


# --------------------------------------------------------------------------
# Value function assembly
# --------------------------------------------------------------------------

def assemble_Q(W: Curve, p: ModelParams) -> Curve:
    """``Q(x) = Q(0) + int_0^x W`` with ``alpha Q(0) = (sigma^2/2) W'(0) + beta W(0)``.

    The antiderivative uses the trapezoid rule with the Hermite end
    correction ``h^2 (W'_i - W'_{i+1}) / 12``, which is exact for cubics.
    """
    i0 = W.index_of(0.0)
    q0 = (0.5 * p.sigma2 * W.dy[i0] + p.beta * W.y[i0]) / p.alpha
    h = np.diff(W.grid)
    cell = 0.5 * h * (W.y[:-1] + W.y[1:]) + h * h / 12.0 * (W.dy[:-1] - W.dy[1:])
    cum = np.concatenate([[0.0], np.cumsum(cell)])
    Q = q0 + cum - cum[i0]
    return Curve(W.grid, Q, W.y.copy())


def hjb_branches(sol: PolicySolution) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The three HJB branches ``(G Q + C, Q' + p_b, p_s - Q')`` on the grid."""
    p = sol.params
    x = sol.Q_curve.grid
    Q = sol.Q_curve.y
    W = sol.W_curve.y
    Wp = sol.W_curve.dy
    gen = 0.5 * p.sigma2 * Wp + (p.beta - drift_h(p, x)) * W - p.alpha * Q + holding_cost_C(p, x)
    return gen, W + p.p_b, p.p_s - W


def hjb_residual(sol: PolicySolution) -> np.ndarray:
    gen, lo, hi = hjb_branches(sol)
    return np.minimum(np.minimum(gen, lo), hi)


def _piecewise_curve(pieces) -> Curve:
    xs, ys, dys = [], [], []
    for k, (x, y, dy) in enumerate(pieces):
        s = slice(0 if k == 0 else 1, None)
        xs.append(np.asarray(x)[s])
        ys.append(np.asarray(y)[s])
        dys.append(np.asarray(dy)[s])
    return Curve(np.concatenate(xs), np.concatenate(ys), np.concatenate(dys))


def _const_piece(x0, x1, value, h):
    x = _nodes(x0, x1, h)
    return x, np.full_like(x, value), np.zeros_like(x)


def _solve_two_sided(p: ModelParams, cfg: SolverConfig) -> PolicySolution:
    a_up, a_down = _bracket_c(p, cfg)
    c_mid = 0.5 * (a_up + a_down)
    a_star, b_star = _find_barriers(p, cfg, a_down)
    shot = _shoot(a_star, p, cfg)
    h = cfg.grid_step
    xl = _nodes(a_star, 0.0, h)
    xr = _nodes(0.0, b_star, h)
    yl = shot.left.sol(xl)
    yr = shot.right.sol(xr)
    yr[1, -1] = 0.0  # event location: W'(b*) = 0 up to root-finding error
    W = _piecewise_curve([
        _const_piece(a_star - cfg.q_pad, a_star, -p.p_b, h),
        (xl, yl[0], yl[1]),
        (xr, yr[0], yr[1]),
        _const_piece(b_star, b_star + cfg.q_pad, p.p_s, h),
    ])
    return PolicySolution(
        Regime.TWO_SIDED, p, W, assemble_Q(W, p), a_star=a_star, b_star=b_star, c=c_mid,
        info={"M_at_a_star": float(yr[0, -1]), "Wp_b_star": float(shot.right.sol(b_star)[1])},
    )


def _polish_c(p: ModelParams, cfg: SolverConfig, psi0: _Decaying, a_up: float, a_down: float) -> float:
    """Refine ``c`` as the root of the pasting defect ``W_a'(0) - (W_a(0) - T_s) Psi_0'(0)``."""
    d = psi0.slope0

    def defect(a):
        left = _ivp(_rhs_left(p), a, 0.0, [-p.p_b, 0.0], cfg, dense=False)
        w0, wp0 = left.y[:, -1]
        return wp0 - (w0 - p.T_s) * d

    lo, hi = a_up - cfg.bisect_tol, a_down + cfg.bisect_tol
    f_lo, f_hi = defect(lo), defect(hi)
    if f_lo * f_hi > 0:
        return 0.5 * (a_up + a_down)
    return _root(defect, lo, hi, 1e-15, cfg.max_iter, "separatrix polishing")


def _solve_left_reflect(p: ModelParams, cfg: SolverConfig) -> PolicySolution:
    a_up, a_down = _bracket_c(p, cfg)
    c_mid = 0.5 * (a_up + a_down)
    psi0 = decaying_solution(p, cfg, cfg.x_max)
    _confirm_separatrix(p, cfg, psi0.slope0)
    c = _polish_c(p, cfg, psi0, a_up, a_down)
    h = cfg.grid_step
    left = _ivp(_rhs_left(p), c, 0.0, [-p.p_b, 0.0], cfg)
    w0 = float(left.y[0, -1])
    xl = _nodes(c, 0.0, h)
    yl = left.sol(xl)
    xr = _nodes(0.0, cfg.x_max, h)
    ur = psi0(xr)
    k = w0 - p.T_s
    W = _piecewise_curve([
        _const_piece(c - cfg.q_pad, c, -p.p_b, h),
        (xl, yl[0], yl[1]),
        (xr, k * ur[0] + p.T_s, k * ur[1]),
    ])
    return PolicySolution(
        Regime.LEFT_REFLECT, p, W, assemble_Q(W, p), a_star=c, c=c,
        info={"c_bisection": c_mid, "pasting_defect": float(yl[1, -1] - k * ur[1, 0])},
    )


def _unmirror(sol: PolicySolution, p: ModelParams) -> PolicySolution:
    def flip(curve: Curve, odd: bool) -> Curve:
        y = curve.y[::-1]
        dy = curve.dy[::-1]
        if odd:
            return Curve(-curve.grid[::-1], -y, dy)
        return Curve(-curve.grid[::-1], y, -dy)

    return PolicySolution(
        Regime.RIGHT_REFLECT, p, flip(sol.W_curve, odd=True), flip(sol.Q_curve, odd=False),
        a_star=None, b_star=-sol.a_star, c=-sol.c, info=dict(sol.info, mirrored=True),
    )


def solve(p: ModelParams, cfg: SolverConfig | None = None) -> PolicySolution:
    """Optimal policy and value function for the regime selected by ``p``."""
    if cfg is None:
        cfg = SolverConfig.default_for(p)
    cfg.validate_for(p)
    regime = classify_regime(p)
    if regime is Regime.ZERO_CONTROL:
        W, k_s, k_b = solve_zero_control(p, cfg)
        return PolicySolution(regime, p, W, assemble_Q(W, p), k_s=k_s, k_b=k_b)
    if regime is Regime.TWO_SIDED:
        return _solve_two_sided(p, cfg)
    if regime is Regime.LEFT_REFLECT:
        return _solve_left_reflect(p, cfg)
    q = mirror(p)
    return _unmirror(_solve_left_reflect(q, SolverConfig.default_for(q, **_overrides(cfg, p))), p)


def _overrides(cfg: SolverConfig, p: ModelParams) -> dict:
    # keep user tolerances, swap the horizon ends for the mirrored problem
    d = cfg.as_dict()
    d["x_max"], d["x_min"] = -cfg.x_min, -cfg.x_max
    return d
