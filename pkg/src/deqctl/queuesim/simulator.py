"""Event-driven simulation of the n-th double-ended matching queue.

Sellers and buyers arrive as independent renewal streams.  An arrival is
matched at once with the longest-waiting customer of the other class when
one is present (first come, first matched); otherwise it joins its own
queue if there is room under the buffer policy and is blocked if not.
Admitted customers carry a patience clock; initial customers never abandon.
The imbalance ``X`` counts waiting sellers minus waiting buyers.
"""
from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from ..params import ModelParams
from .distributions import ArrivalClock, Interarrival, Patience, patience_source

# event codes in the log
INIT, ARRIVAL, BLOCKED, ABANDON = 0, 1, 2, 3
EVENT_NAMES = {INIT: "init", ARRIVAL: "arrival", BLOCKED: "blocked", ABANDON: "abandon"}
# class codes
NONE, SELLER, BUYER = 0, 1, 2
CLASS_NAMES = {NONE: "", SELLER: "s", BUYER: "b"}

_WAITING, _MATCHED, _ABANDONED = 0, 1, 2

# random stream ids per replication
_STREAM_ARR_S, _STREAM_ARR_B, _STREAM_PAT_S, _STREAM_PAT_B = range(4)


@dataclass(frozen=True)
class QueueConfig:
    n: int
    lambda0: float
    beta_b: float
    beta_s: float
    interarrival_b: Interarrival = field(default_factory=Interarrival)
    interarrival_s: Interarrival = field(default_factory=Interarrival)
    patience_b: Patience = field(default_factory=Patience)
    patience_s: Patience = field(default_factory=Patience)
    c_b: float = 1.0
    c_s: float = 1.0
    r_b: float = 0.0
    r_s: float = 0.0
    p_b: float = 1.0
    p_s: float = 1.0
    alpha: float = 1.0
    x0_hat: float = 0.0

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not self.lambda0 > 0:
            raise ValueError("lambda0 must be > 0")
        if not (self.lam_b > 0 and self.lam_s > 0):
            raise ValueError(
                f"arrival rates must be positive at n={self.n}: "
                f"lam_b={self.lam_b:.6g}, lam_s={self.lam_s:.6g}"
            )
        for name in ("c_b", "c_s", "r_b", "r_s", "p_b", "p_s"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")

    @property
    def sqrt_n(self) -> float:
        return math.sqrt(self.n)

    @property
    def lam_b(self) -> float:
        return self.lambda0 * self.n + self.beta_b * self.sqrt_n

    @property
    def lam_s(self) -> float:
        return self.lambda0 * self.n + self.beta_s * self.sqrt_n

    @property
    def x0_count(self) -> int:
        return int(round(self.x0_hat * self.sqrt_n))

    def with_n(self, n: int) -> "QueueConfig":
        return replace(self, n=n)

    def limit_params(self) -> ModelParams:
        """Diffusion-limit parameters of this family of systems."""
        d_b = self.patience_b.hazard_at_zero
        d_s = self.patience_s.hazard_at_zero
        return ModelParams(
            sigma2=(self.interarrival_b.squared_cv() + self.interarrival_s.squared_cv()) * self.lambda0,
            beta=self.beta_s - self.beta_b,
            alpha=self.alpha,
            delta_b=d_b,
            delta_s=d_s,
            theta_b=self.c_b + self.r_b * d_b,
            theta_s=self.c_s + self.r_s * d_s,
            p_b=self.p_b,
            p_s=self.p_s,
        )


@dataclass(frozen=True)
class BufferPolicy:
    """Constant buffers; ``None`` leaves that side unbounded."""

    m_b: int | None = None
    m_s: int | None = None

    def __post_init__(self) -> None:
        if self.m_b is not None and (int(self.m_b) != self.m_b or self.m_b > -1):
            raise ValueError(f"m_b must be an integer <= -1, got {self.m_b}")
        if self.m_s is not None and (int(self.m_s) != self.m_s or self.m_s < 1):
            raise ValueError(f"m_s must be an integer >= 1, got {self.m_s}")

    @classmethod
    def from_barriers(cls, a: float | None, b: float | None, n: int) -> "BufferPolicy":
        """Lattice translation of scaled barriers: ``-max(1, round(|a| sqrt n))`` etc."""
        r = math.sqrt(n)
        m_b = None if a is None or math.isinf(a) else -max(1, int(round(abs(a) * r)))
        m_s = None if b is None or math.isinf(b) else max(1, int(round(b * r)))
        return cls(m_b, m_s)


@dataclass(frozen=True)
class QueueTrajectory:
    """Event log of one run.

    Row 0 is the state at time 0 after any initial removal.  Counters are
    cumulative; ``arrivals_*`` hold every arrival epoch of a class (blocked
    ones included), and ``admitted_*``/``departed_*`` the arrival and
    leaving epochs of customers that waited in queue (``inf`` if still
    waiting at ``T``).
    """

    n: int
    T: float
    x_pre: int
    t: np.ndarray
    event: np.ndarray
    cls: np.ndarray
    X: np.ndarray
    A_b: np.ndarray
    A_s: np.ndarray
    G_b: np.ndarray
    G_s: np.ndarray
    U_b: np.ndarray
    U_s: np.ndarray
    arrivals_b: np.ndarray
    arrivals_s: np.ndarray
    admitted_b: np.ndarray
    departed_b: np.ndarray
    admitted_s: np.ndarray
    departed_s: np.ndarray
    matched_b: np.ndarray
    matched_s: np.ndarray

    def balance_defect(self) -> np.ndarray:
        return self.X - (self.x_pre + self.A_s - self.A_b - self.G_s + self.G_b - self.U_s + self.U_b)

    def waiting_times(self, cls: str) -> np.ndarray:
        """Realised waits of admitted customers of a class that were matched."""
        adm, dep, m = (
            (self.admitted_s, self.departed_s, self.matched_s) if cls == "s"
            else (self.admitted_b, self.departed_b, self.matched_b)
        )
        return (dep - adm)[m]


def _rng(seed: int, rep: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(rep), stream])))


def simulate_queue(cfg: QueueConfig, policy: BufferPolicy, T: float, seed: int, rep: int = 0) -> QueueTrajectory:
    """Run the matching queue on ``[0, T]``.

    Streams are keyed by ``(seed, rep)`` with one stream per class for
    arrivals and for patience, so different policies see common random
    numbers.  Simultaneous events are handled seller arrival first, then
    buyer arrival, then abandonments in deadline order.
    """
    if not T > 0:
        raise ValueError("T must be > 0")
    m_s = math.inf if policy.m_s is None else policy.m_s
    m_b = -math.inf if policy.m_b is None else policy.m_b
    arr_s = ArrivalClock(cfg.interarrival_s, 1.0 / cfg.lam_s, _rng(seed, rep, _STREAM_ARR_S))
    arr_b = ArrivalClock(cfg.interarrival_b, 1.0 / cfg.lam_b, _rng(seed, rep, _STREAM_ARR_B))
    pat_s = patience_source(cfg.patience_s, _rng(seed, rep, _STREAM_PAT_S))
    pat_b = patience_source(cfg.patience_b, _rng(seed, rep, _STREAM_PAT_B))

    # customer records
    c_cls: list[int] = []
    c_arr: list[float] = []
    c_dep: list[float] = []
    c_state: list[int] = []
    q_s: deque[int] = deque()
    q_b: deque[int] = deque()

    x_pre = cfg.x0_count
    x = min(max(x_pre, m_b), m_s)
    removed_s = max(x_pre - x, 0)
    removed_b = max(x - x_pre, 0)
    for _ in range(abs(x)):
        cid = len(c_cls)
        c_cls.append(SELLER if x > 0 else BUYER)
        c_arr.append(0.0)
        c_dep.append(math.inf)
        c_state.append(_WAITING)
        (q_s if x > 0 else q_b).append(cid)
    n_s = max(x, 0)
    n_b = max(-x, 0)

    log_t = [0.0]
    log_e = [INIT]
    log_c = [NONE]
    log_x = [x]
    all_s: list[float] = []
    all_b: list[float] = []

    heap: list[tuple[float, int]] = []
    inf = math.inf
    ts = arr_s.next()
    tb = arr_b.next()
    while True:
        while heap and c_state[heap[0][1]] != _WAITING:
            heapq.heappop(heap)
        ta = heap[0][0] if heap else inf
        if ts <= tb and ts <= ta:
            t = ts
            if t > T:
                break
            all_s.append(t)
            if n_b > 0:
                cid = q_b.popleft()
                while c_state[cid] != _WAITING:
                    cid = q_b.popleft()
                c_state[cid] = _MATCHED
                c_dep[cid] = t
                n_b -= 1
                x += 1
                ev = ARRIVAL
            elif x < m_s:
                cid = len(c_cls)
                c_cls.append(SELLER)
                c_arr.append(t)
                c_dep.append(inf)
                c_state.append(_WAITING)
                q_s.append(cid)
                n_s += 1
                x += 1
                d = t + pat_s.next()
                if d < inf:
                    heapq.heappush(heap, (d, cid))
                ev = ARRIVAL
            else:
                ev = BLOCKED
            log_t.append(t)
            log_e.append(ev)
            log_c.append(SELLER)
            log_x.append(x)
            ts = arr_s.next()
        elif tb <= ta:
            t = tb
            if t > T:
                break
            all_b.append(t)
            if n_s > 0:
                cid = q_s.popleft()
                while c_state[cid] != _WAITING:
                    cid = q_s.popleft()
                c_state[cid] = _MATCHED
                c_dep[cid] = t
                n_s -= 1
                x -= 1
                ev = ARRIVAL
            elif x > m_b:
                cid = len(c_cls)
                c_cls.append(BUYER)
                c_arr.append(t)
                c_dep.append(inf)
                c_state.append(_WAITING)
                q_b.append(cid)
                n_b += 1
                x -= 1
                d = t + pat_b.next()
                if d < inf:
                    heapq.heappush(heap, (d, cid))
                ev = ARRIVAL
            else:
                ev = BLOCKED
            log_t.append(t)
            log_e.append(ev)
            log_c.append(BUYER)
            log_x.append(x)
            tb = arr_b.next()
        else:
            t = ta
            if t > T:
                break
            _, cid = heapq.heappop(heap)
            c_state[cid] = _ABANDONED
            c_dep[cid] = t
            if c_cls[cid] == SELLER:
                n_s -= 1
                x -= 1
            else:
                n_b -= 1
                x += 1
            log_t.append(t)
            log_e.append(ABANDON)
            log_c.append(c_cls[cid])
            log_x.append(x)

    ev = np.array(log_e, dtype=np.int8)
    cl = np.array(log_c, dtype=np.int8)

    def count(e_codes, c_code, offset=0):
        hits = np.isin(ev, e_codes) & (cl == c_code)
        return np.cumsum(hits, dtype=np.int64) + offset

    cc = np.array(c_cls, dtype=np.int8)
    ca = np.array(c_arr)
    cd = np.array(c_dep)
    cs = np.array(c_state, dtype=np.int8)
    is_s = cc == SELLER
    return QueueTrajectory(
        n=cfg.n,
        T=float(T),
        x_pre=x_pre,
        t=np.array(log_t),
        event=ev,
        cls=cl,
        X=np.array(log_x, dtype=np.int64),
        A_b=count([ARRIVAL, BLOCKED], BUYER),
        A_s=count([ARRIVAL, BLOCKED], SELLER),
        G_b=count([ABANDON], BUYER),
        G_s=count([ABANDON], SELLER),
        U_b=count([BLOCKED], BUYER, removed_b),
        U_s=count([BLOCKED], SELLER, removed_s),
        arrivals_b=np.array(all_b),
        arrivals_s=np.array(all_s),
        admitted_b=ca[~is_s],
        departed_b=cd[~is_s],
        admitted_s=ca[is_s],
        departed_s=cd[is_s],
        matched_b=cs[~is_s] == _MATCHED,
        matched_s=cs[is_s] == _MATCHED,
    )
