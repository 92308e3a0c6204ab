from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deqctl.skorokhod import (
    Path,
    modulus,
    oscillation,
    reflect_one_sided,
    reflect_time_varying,
    reflect_two_sided,
)
from oracles import brute_modulus, brute_oscillation, project_moving, project_one_sided, project_two_sided

TOL = 1e-12


def walk(rng, n=1000, step=0.05, start=0.0):
    return Path(0.0, 1.0 / n, start + step * np.cumsum(rng.choice([-1.0, 1.0], n)))


def check_decomposition(psi, d, lo, hi):
    phi, el, er = d.phi.values, d.eta_l.values, d.eta_r.values
    assert np.all(np.diff(el) >= -TOL) and el[0] >= 0
    assert np.all(np.diff(er) >= -TOL) and er[0] >= 0
    assert np.max(np.abs(phi - (psi.values + el - er))) <= 1e-12 * max(1.0, np.abs(psi.values).max())
    assert np.all(phi >= lo - TOL) and np.all(phi <= hi + TOL)
    up = np.diff(el, prepend=0.0) > TOL
    dn = np.diff(er, prepend=0.0) > TOL
    assert np.all(np.abs((phi - lo)[up]) <= TOL)
    assert np.all(np.abs((phi - hi)[dn]) <= TOL)


# -- one-sided ---------------------------------------------------------------

def test_one_sided_untouched():
    psi = Path.from_function(lambda t: t, 0.0, 1.0, 101)
    d = reflect_one_sided(psi, 0.0)
    assert np.array_equal(d.phi.values, psi.values)
    assert not d.eta_l.values.any()


def test_one_sided_pure_push():
    psi = Path.from_function(lambda t: -t, 0.0, 1.0, 101)
    d = reflect_one_sided(psi, 0.0)
    assert np.allclose(d.phi.values, 0.0, atol=TOL)
    assert np.allclose(d.eta_l.values, psi.times, atol=TOL)


def test_one_sided_matches_projection():
    rng = np.random.default_rng(11)
    psi = walk(rng, step=1.0)
    d = reflect_one_sided(psi, 0.0)
    assert np.array_equal(d.phi.values, project_one_sided(psi.values, 0.0))


# -- two-sided ---------------------------------------------------------------

def test_two_sided_interior_path_untouched():
    psi = Path.from_function(lambda t: 0.5 * np.sin(6 * t), 0.0, 1.0, 200)
    d = reflect_two_sided(psi, -1.0, 1.0)
    assert np.array_equal(d.phi.values, psi.values)
    assert not d.eta_l.values.any() and not d.eta_r.values.any()


def test_two_sided_linear_ramp():
    psi = Path.from_function(lambda t: 2 * t, 0.0, 1.0, 101)
    d = reflect_two_sided(psi, 0.0, 1.0)
    t = psi.times
    assert np.allclose(d.phi.values, np.minimum(2 * t, 1.0), atol=TOL)
    assert np.allclose(d.eta_r.values, np.maximum(2 * t - 1.0, 0.0), atol=TOL)
    assert not d.eta_l.values.any()


def test_two_sided_rejects_bad_interval():
    psi = Path(0.0, 0.1, np.zeros(5))
    with pytest.raises(ValueError):
        reflect_two_sided(psi, 1.0, 1.0)
    with pytest.raises(ValueError):
        reflect_two_sided(psi, 2.0, 1.0)


def test_two_sided_agrees_with_one_sided_below_b():
    rng = np.random.default_rng(3)
    psi = walk(rng, step=0.01)
    b = psi.values.max() + 1.0
    a = float(np.quantile(psi.values, 0.3))
    one = reflect_one_sided(psi, a).phi.values
    if one.max() < b:
        assert np.max(np.abs(reflect_two_sided(psi, a, b).phi.values - one)) <= TOL


def test_two_sided_matches_projection_and_invariants():
    rng = np.random.default_rng(5)
    for _ in range(20):
        psi = walk(rng, step=0.1)
        d = reflect_two_sided(psi, -1.0, 1.0)
        assert np.max(np.abs(d.phi.values - project_two_sided(psi.values, -1.0, 1.0))) <= TOL
        check_decomposition(psi, d, -1.0, 1.0)


def test_perturbation_bound_on_nested_barriers():
    rng = np.random.default_rng(710)
    for _ in range(1000):
        psi = Path(0.0, 1e-3, rng.normal(0, 0.1, 300).cumsum())
        c, a, b, d = np.sort(rng.uniform(-2, 2, 4))
        if b - a < 1e-6:
            continue
        gap = np.max(np.abs(reflect_two_sided(psi, c, d).phi.values - reflect_two_sided(psi, a, b).phi.values))
        assert gap <= 3 * (abs(a - c) + abs(b - d)) + 1e-12


# -- moving barriers ----------------------------------------------------------

def test_moving_matches_constant_map():
    rng = np.random.default_rng(8)
    psi = walk(rng, step=0.1)
    lo = psi.like(np.full(len(psi), -0.7))
    hi = psi.like(np.full(len(psi), 0.9))
    fixed = reflect_two_sided(psi, -0.7, 0.9)
    moving = reflect_time_varying(psi, lo, hi)
    for x, y in ((fixed.phi, moving.phi), (fixed.eta_l, moving.eta_l), (fixed.eta_r, moving.eta_r)):
        assert np.max(np.abs(x.values - y.values)) <= TOL


def test_moving_inactive_barriers():
    t = np.linspace(0, 1, 501)
    psi = Path(0.0, t[1], 0.9 * np.sin(7 * t))
    d = reflect_time_varying(psi, psi.like(-1 - t), psi.like(1 + t))
    assert np.array_equal(d.phi.values, psi.values)


def test_moving_sawtooth_matches_projection():
    rng = np.random.default_rng(12)
    k = np.arange(1000)
    for _ in range(20):
        psi = walk(rng, step=0.08)
        lo = psi.like(-1.0 - 0.5 * (k % 97) / 97.0)
        hi = psi.like(1.0 + 0.5 * (k % 61) / 61.0)
        d = reflect_time_varying(psi, lo, hi)
        ref = project_moving(psi.values, lo.values, hi.values)
        assert np.max(np.abs(d.phi.values - ref)) <= TOL
        check_decomposition(psi, d, lo.values, hi.values)


def test_moving_rejects_misaligned_and_crossing():
    psi = Path(0.0, 0.1, np.zeros(10))
    with pytest.raises(ValueError):
        reflect_time_varying(psi, Path(0.0, 0.2, np.zeros(10) - 1), psi.like(np.ones(10)))
    with pytest.raises(ValueError):
        reflect_time_varying(psi, psi.like(np.zeros(10)), psi.like(np.zeros(10)))


def test_oscillation_bound_moving_barriers():
    rng = np.random.default_rng(360)
    n = 400
    for _ in range(200):
        psi = Path(0.0, 1.0 / n, rng.normal(0, 0.08, n).cumsum())
        lo = psi.like(-1.0 + rng.normal(0, 0.05, n).cumsum() * 0.3)
        hi = psi.like(lo.values + 0.2 + np.abs(rng.normal(0, 1.0, n)))
        d = reflect_time_varying(psi, lo, hi)
        delta = rng.uniform(0.005, 0.3)
        lhs = modulus(d.phi, delta)
        rhs = 4 * (modulus(psi, delta) + modulus(lo, delta) + modulus(hi, delta))
        assert lhs <= rhs + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=60),
       st.lists(st.floats(0, 1), min_size=2, max_size=60),
       st.floats(-1, 0))
def test_one_sided_monotone_in_nondecreasing_perturbation(vals, incs, a):
    m = min(len(vals), len(incs))
    f = np.array(vals[:m])
    g = np.cumsum(incs[:m])
    base = reflect_one_sided(Path(0.0, 0.1, f), a).phi.values
    pushed = reflect_one_sided(Path(0.0, 0.1, f + g), a).phi.values
    assert np.all(base <= pushed + 1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=1, max_size=80), st.floats(-2, 0), st.floats(0.01, 3))
def test_two_sided_decomposition_property(vals, a, width):
    psi = Path(0.0, 0.01, np.array(vals))
    d = reflect_two_sided(psi, a, a + width)
    check_decomposition(psi, d, a, a + width)


# -- oscillation --------------------------------------------------------------

def test_oscillation_constant_and_linear():
    c = Path(0.0, 0.01, np.full(50, 3.0))
    assert oscillation(c, 0.0, 0.49) == 0.0
    assert modulus(c, 0.2) == 0.0
    f = Path.from_function(lambda t: t, 0.0, 1.0, 101)
    assert oscillation(f, 0.0, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert modulus(f, 0.1) == pytest.approx(0.1, abs=1e-12)


def test_oscillation_matches_brute_force():
    rng = np.random.default_rng(21)
    for _ in range(10):
        f = Path(0.0, 0.05, rng.normal(size=60))
        assert oscillation(f, 0.0, f.t_end) == brute_oscillation(f.values)
        t1, t2 = np.sort(rng.uniform(0, f.t_end, 2))
        i, j = int(np.floor(t1 / 0.05 + 1e-9)), int(np.floor(t2 / 0.05 + 1e-9))
        assert oscillation(f, t1, t2) == brute_oscillation(f.values[i:j + 1])


def test_modulus_matches_brute_force():
    rng = np.random.default_rng(22)
    for delta in (0.05, 0.07, 0.1, 0.31, 5.0):
        f = Path(0.0, 0.01, rng.normal(size=80).cumsum())
        assert modulus(f, delta) == pytest.approx(brute_modulus(f.values, 0.01, delta), abs=1e-12)


def test_window_errors():
    f = Path(0.0, 0.1, np.arange(11.0))
    with pytest.raises(ValueError):
        oscillation(f, -0.5, 0.5)
    with pytest.raises(ValueError):
        oscillation(f, 0.0, 1.5)
    with pytest.raises(ValueError):
        oscillation(f, 0.6, 0.4)
    with pytest.raises(ValueError):
        modulus(f, 0.0)


def test_path_validation():
    with pytest.raises(ValueError):
        Path(0.0, 0.0, [1.0])
    with pytest.raises(ValueError):
        Path(0.0, 0.1, [])
