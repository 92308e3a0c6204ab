"""Model parameters of the limiting diffusion control problem.

The tuple ``(sigma2, beta, alpha, delta_b, delta_s, theta_b, theta_s, p_b, p_s)``
describes the controlled state ``dX = (beta - h(X)) dt + sigma dB - dU`` and
the running cost ``C(X) dt + p_s dU_s + p_b dU_b`` discounted at rate ``alpha``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields, replace

import numpy as np


class Regime(enum.Enum):
    ZERO_CONTROL = "ZeroControl"
    TWO_SIDED = "TwoSided"
    LEFT_REFLECT = "LeftReflect"
    RIGHT_REFLECT = "RightReflect"

    def __str__(self) -> str:
        return self.value


class InvalidParams(ValueError):
    """Raised when a parameter violates its positivity or finiteness constraint."""

    def __init__(self, msg: str, field: str | None = None):
        super().__init__(msg)
        self.field = field


_POSITIVE = ("sigma2", "alpha", "delta_b", "delta_s", "theta_b", "theta_s", "p_b", "p_s")


@dataclass(frozen=True)
class ModelParams:
    sigma2: float
    beta: float
    alpha: float
    delta_b: float
    delta_s: float
    theta_b: float
    theta_s: float
    p_b: float
    p_s: float

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise InvalidParams(f"{f.name} must be a finite real, got {v!r}", f.name)
            object.__setattr__(self, f.name, float(v))
        for name in _POSITIVE:
            if getattr(self, name) <= 0.0:
                raise InvalidParams(f"{name} must be > 0, got {getattr(self, name)!r}", name)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def T_s(self) -> float:
        return self.theta_s / (self.alpha + self.delta_s)

    @property
    def T_b(self) -> float:
        return self.theta_b / (self.alpha + self.delta_b)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise InvalidParams(f"unknown parameter(s): {sorted(unknown)}")
        missing = names - set(d)
        if missing:
            raise InvalidParams(f"missing parameter(s): {sorted(missing)}")
        return cls(**d)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


# Worked example used throughout the test-suite and the ``check`` command.
WORKED_EXAMPLE = ModelParams(
    sigma2=1.0, beta=2.0, alpha=1.0, delta_b=2.0, delta_s=4.0,
    theta_b=4.0, theta_s=5.0, p_b=0.4, p_s=0.1,
)


def thresholds(p: ModelParams) -> tuple[float, float]:
    """Return ``(T_s, T_b)``, the blocking-cost levels above which blocking never pays."""
    return p.theta_s / (p.alpha + p.delta_s), p.theta_b / (p.alpha + p.delta_b)


def classify_regime(p: ModelParams) -> Regime:
    # ties p == T fall on the no-blocking side
    T_s, T_b = thresholds(p)
    block_s = p.p_s < T_s
    block_b = p.p_b < T_b
    if block_s and block_b:
        return Regime.TWO_SIDED
    if block_b:
        return Regime.LEFT_REFLECT
    if block_s:
        return Regime.RIGHT_REFLECT
    return Regime.ZERO_CONTROL


def drift_h(p: ModelParams, x):
    """Abandonment drift ``delta_s x^+ - delta_b x^-``; works on scalars and arrays."""
    if np.isscalar(x):
        return p.delta_s * max(x, 0.0) - p.delta_b * max(-x, 0.0)
    x = np.asarray(x, dtype=float)
    return p.delta_s * np.maximum(x, 0.0) - p.delta_b * np.maximum(-x, 0.0)


def holding_cost_C(p: ModelParams, x):
    """Effective holding cost ``theta_s x^+ + theta_b x^-``."""
    if np.isscalar(x):
        return p.theta_s * max(x, 0.0) + p.theta_b * max(-x, 0.0)
    x = np.asarray(x, dtype=float)
    return p.theta_s * np.maximum(x, 0.0) + p.theta_b * np.maximum(-x, 0.0)


def mirror(p: ModelParams) -> ModelParams:
    """Reflect the problem through ``x -> -x``: buyer and seller roles swap, drift flips."""
    return ModelParams(
        sigma2=p.sigma2, beta=-p.beta, alpha=p.alpha,
        delta_b=p.delta_s, delta_s=p.delta_b,
        theta_b=p.theta_s, theta_s=p.theta_b,
        p_b=p.p_s, p_s=p.p_b,
    )


def mirror_regime(r: Regime) -> Regime:
    return {
        Regime.LEFT_REFLECT: Regime.RIGHT_REFLECT,
        Regime.RIGHT_REFLECT: Regime.LEFT_REFLECT,
    }.get(r, r)
