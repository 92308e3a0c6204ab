"""Interarrival and patience distribution families.

Interarrival families are described by shape only; the mean is fixed by the
arrival rate of the scaled system.  Patience families carry their hazard
at zero, which is what survives in the diffusion limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INTERARRIVAL_FAMILIES = ("exponential", "deterministic", "erlang", "hyperexp2", "trace")
PATIENCE_FAMILIES = ("exponential", "uniform", "deterministic", "none")


@dataclass(frozen=True)
class Interarrival:
    """Renewal interarrival law.

    ``erlang`` uses shape ``k``; ``hyperexp2`` is the balanced-means
    two-phase mixture with squared coefficient of variation ``scv >= 1``.
    ``trace`` ignores the rate and replays the arrival epochs in ``times``.
    """

    family: str = "exponential"
    k: int = 2
    scv: float = 2.0
    times: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.family not in INTERARRIVAL_FAMILIES:
            raise ValueError(f"unknown interarrival family {self.family!r}")
        if self.family == "erlang" and self.k < 1:
            raise ValueError("erlang shape k must be >= 1")
        if self.family == "hyperexp2" and not self.scv >= 1.0:
            raise ValueError("hyperexp2 needs scv >= 1")
        if self.family == "trace":
            ts = tuple(float(t) for t in self.times)
            if any(t < 0 for t in ts) or list(ts) != sorted(ts):
                raise ValueError("trace times must be non-negative and sorted")
            object.__setattr__(self, "times", ts)

    def squared_cv(self) -> float:
        return {
            "exponential": 1.0,
            "deterministic": 0.0,
            "erlang": 1.0 / self.k,
            "hyperexp2": self.scv,
            "trace": 0.0,
        }[self.family]

    def sample(self, rng: np.random.Generator, mean: float, size: int) -> np.ndarray:
        f = self.family
        if f == "exponential":
            return rng.exponential(mean, size)
        if f == "deterministic":
            return np.full(size, float(mean))
        if f == "erlang":
            return rng.gamma(self.k, mean / self.k, size)
        if f == "hyperexp2":
            q = 0.5 * (1.0 + math.sqrt((self.scv - 1.0) / (self.scv + 1.0)))
            # balanced means: q / mu_1 = (1 - q) / mu_2 = mean / 2
            m1, m2 = mean / (2.0 * q), mean / (2.0 * (1.0 - q))
            pick = rng.random(size) < q
            return np.where(pick, rng.exponential(m1, size), rng.exponential(m2, size))
        raise ValueError("trace interarrivals are replayed, not sampled")


@dataclass(frozen=True)
class Patience:
    """Patience law with ``F(0) = 0``; ``delta`` is the right derivative of F at 0.

    ``uniform`` is uniform on ``[0, 1/delta]`` so that ``F(h) = delta h``
    near zero.  ``deterministic`` waits exactly ``value`` (hazard 0 at 0);
    ``none`` never abandons.
    """

    family: str = "exponential"
    delta: float = 1.0
    value: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in PATIENCE_FAMILIES:
            raise ValueError(f"unknown patience family {self.family!r}")
        if self.family in ("exponential", "uniform") and not self.delta > 0:
            raise ValueError("patience delta must be > 0")
        if self.family == "deterministic" and not self.value > 0:
            raise ValueError("deterministic patience must be > 0 so that F(0) = 0")

    @property
    def hazard_at_zero(self) -> float:
        return self.delta if self.family in ("exponential", "uniform") else 0.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        f = self.family
        if f == "exponential":
            return rng.exponential(1.0 / self.delta, size)
        if f == "uniform":
            return rng.uniform(0.0, 1.0 / self.delta, size)
        if f == "deterministic":
            return np.full(size, float(self.value))
        return np.full(size, math.inf)


class _Buffered:
    """Hands out draws one at a time from blocks of a vectorised sampler."""

    __slots__ = ("_draw", "_block", "_buf", "_i")

    def __init__(self, draw, block: int = 256):
        self._draw = draw
        self._block = block
        self._buf: list[float] = []
        self._i = 0

    def next(self) -> float:
        if self._i >= len(self._buf):
            self._buf = self._draw(self._block).tolist()
            self._i = 0
        v = self._buf[self._i]
        self._i += 1
        return v


class ArrivalClock:
    """Successive arrival epochs of one class, starting from time 0."""

    def __init__(self, law: Interarrival, mean: float, rng: np.random.Generator):
        self._trace = law.family == "trace"
        if self._trace:
            self._times = list(law.times)
            self._j = 0
        else:
            self._gaps = _Buffered(lambda m: law.sample(rng, mean, m))
            self._t = 0.0

    def next(self) -> float:
        if self._trace:
            if self._j >= len(self._times):
                return math.inf
            self._j += 1
            return self._times[self._j - 1]
        self._t += self._gaps.next()
        return self._t


def patience_source(law: Patience, rng: np.random.Generator) -> _Buffered:
    return _Buffered(lambda m: law.sample(rng, m), block=128)
