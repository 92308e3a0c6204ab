from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from deqctl.params import (
    WORKED_EXAMPLE,
    InvalidParams,
    ModelParams,
    Regime,
    classify_regime,
    drift_h,
    holding_cost_C,
    mirror,
    mirror_regime,
    thresholds,
)

pos = st.floats(min_value=1e-3, max_value=50.0, allow_nan=False)
real = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


@st.composite
def params(draw):
    return ModelParams(
        sigma2=draw(pos), beta=draw(real), alpha=draw(pos),
        delta_b=draw(pos), delta_s=draw(pos), theta_b=draw(pos), theta_s=draw(pos),
        p_b=draw(pos), p_s=draw(pos),
    )


def test_thresholds_worked_example():
    T_s, T_b = thresholds(WORKED_EXAMPLE)
    assert T_s == 1.0
    assert T_b == 4.0 / 3.0
    assert (WORKED_EXAMPLE.T_s, WORKED_EXAMPLE.T_b) == (T_s, T_b)


def test_thresholds_direct():
    p = WORKED_EXAMPLE.with_(theta_s=2.0, delta_s=1.0)
    assert thresholds(p)[0] == 1.0


def test_regime_examples():
    assert classify_regime(WORKED_EXAMPLE) is Regime.TWO_SIDED
    assert classify_regime(WORKED_EXAMPLE.with_(p_s=1.0, p_b=4.0 / 3.0)) is Regime.ZERO_CONTROL
    assert classify_regime(WORKED_EXAMPLE.with_(p_s=2.0)) is Regime.LEFT_REFLECT
    assert classify_regime(WORKED_EXAMPLE.with_(p_b=2.0)) is Regime.RIGHT_REFLECT


def test_regime_ties_go_to_no_blocking():
    p = WORKED_EXAMPLE.with_(p_s=1.0)
    assert classify_regime(p) is Regime.LEFT_REFLECT
    p = WORKED_EXAMPLE.with_(p_b=4.0 / 3.0)
    assert classify_regime(p) is Regime.RIGHT_REFLECT


def test_drift_and_cost_examples():
    p = WORKED_EXAMPLE
    assert drift_h(p, 0.0) == 0.0
    assert drift_h(p, 2.0) == 8.0
    assert drift_h(p, -3.0) == -6.0
    assert holding_cost_C(p, 0.0) == 0.0
    assert holding_cost_C(p, 1.0) == 5.0
    assert holding_cost_C(p, -1.0) == 4.0


def test_vectorised_primitives():
    import numpy as np

    x = np.array([-3.0, 0.0, 2.0])
    assert drift_h(WORKED_EXAMPLE, x).tolist() == [-6.0, 0.0, 8.0]
    assert holding_cost_C(WORKED_EXAMPLE, x).tolist() == [12.0, 0.0, 10.0]


def test_mirror_of_worked_example():
    m = mirror(WORKED_EXAMPLE)
    assert m.as_dict() == dict(
        sigma2=1.0, beta=-2.0, alpha=1.0, delta_b=4.0, delta_s=2.0,
        theta_b=5.0, theta_s=4.0, p_b=0.1, p_s=0.4,
    )


def test_symmetric_params_are_mirror_fixed_points():
    p = ModelParams(1.0, 0.0, 1.0, 2.0, 2.0, 3.0, 3.0, 0.5, 0.5)
    assert mirror(p) == p


@pytest.mark.parametrize("field,value", [
    ("sigma2", 0.0), ("alpha", -1.0), ("delta_b", 0.0), ("theta_s", -2.0),
    ("p_b", 0.0), ("beta", math.nan), ("p_s", math.inf),
])
def test_invalid_params_rejected(field, value):
    with pytest.raises(InvalidParams) as info:
        WORKED_EXAMPLE.with_(**{field: value})
    assert info.value.field == field


def test_from_dict_rejects_unknown_and_missing():
    d = WORKED_EXAMPLE.as_dict()
    assert ModelParams.from_dict(d) == WORKED_EXAMPLE
    with pytest.raises(InvalidParams):
        ModelParams.from_dict({**d, "gamma": 1.0})
    d.pop("beta")
    with pytest.raises(InvalidParams):
        ModelParams.from_dict(d)


@given(params())
def test_mirror_is_involution(p):
    assert mirror(mirror(p)) == p


@given(params())
def test_mirror_swaps_one_sided_regimes(p):
    assert classify_regime(mirror(p)) is mirror_regime(classify_regime(p))


@given(params(), st.floats(0, 1), real, real)
def test_holding_cost_convex(p, lam, x, y):
    lhs = holding_cost_C(p, lam * x + (1 - lam) * y)
    rhs = lam * holding_cost_C(p, x) + (1 - lam) * holding_cost_C(p, y)
    assert lhs <= rhs + 1e-9 * (1 + abs(rhs))


@given(params(), real)
def test_drift_sign(p, x):
    assert x * drift_h(p, x) >= 0.0
    assert holding_cost_C(p, x) >= 0.0
