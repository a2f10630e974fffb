import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from warpiso.errors import ConfigError, DomainError, EvaluationError
from warpiso.quadrature import (DEFAULT_RULE, Box, McOracle, QuadratureRule, RadialRegion,
                                integrate_1d, integrate_1d_many, integrate_nested, mc_estimate)


def test_sine_single_panel():
    rule = QuadratureRule(order=32, panels=1)
    assert abs(integrate_1d(np.sin, 0.0, math.pi, rule) - 2.0) < 1e-13


def test_identity_integrand():
    assert integrate_1d(lambda s: s, 0.0, 1.0) == pytest.approx(0.5, abs=1e-15)


def test_gaussian_antiderivative():
    rule = QuadratureRule(order=64, panels=1)
    got = integrate_1d(lambda s: s * np.exp(s * s / 2), 0.0, 1.0, rule)
    assert abs(got - (math.exp(0.5) - 1.0)) < 1e-12


def test_nested_examples():
    full = lambda th: (np.zeros_like(th), np.ones_like(th))
    assert integrate_nested(lambda th, r: np.ones_like(r), (0, math.pi), full) == pytest.approx(math.pi, abs=1e-13)
    assert integrate_nested(lambda th, r: np.sin(th), (0, math.pi), full) == pytest.approx(2.0, abs=1e-13)
    got = integrate_nested(lambda th, r: np.sin(th) * np.sinh(r) ** 2, (0, math.pi), full)
    assert abs(got - 2 * (math.sinh(2) / 4 - 0.5)) < 1e-10


def test_nested_variable_bounds():
    # area of the unit disc quadrant as int_0^1 sqrt(1 - x^2) dx
    got = integrate_nested(lambda x, y: np.ones_like(y), (0, 1),
                           lambda x: (np.zeros_like(x), np.sqrt(1 - x * x)), QuadratureRule(48, 16))
    assert got == pytest.approx(math.pi / 4, rel=1e-6)


def test_open_singular_left():
    rule = DEFAULT_RULE.with_kind("open-singular-left")
    a = 0.7
    got = integrate_1d(lambda s: (s - a) ** -0.5, a, a + 1.0, rule)
    assert abs(got - 2.0) < 1e-10


def test_open_singular_never_touches_endpoint():
    rule = DEFAULT_RULE.with_kind("open-singular-left")
    s, _ = rule.nodes_weights(1.0, 2.0)
    assert np.all(s > 1.0)


def test_zero_length_interval():
    assert integrate_1d(lambda s: 1 / s, 0.0, 0.0) == 0.0
    out = integrate_1d_many(lambda s: 1 / s, 0.0, np.array([0.0, 1.0]), DEFAULT_RULE.with_kind("open-singular-left"))
    assert out[0] == 0.0


def test_errors():
    with pytest.raises(DomainError):
        integrate_1d(np.sin, 1.0, 0.0)
    with pytest.raises(DomainError):
        integrate_1d(np.sin, 0.0, math.inf)
    with pytest.raises(EvaluationError, match="node"):
        integrate_1d(lambda s: np.where(s > 0.5, np.inf, 1.0), 0.0, 1.0)
    with pytest.raises(ConfigError):
        QuadratureRule(order=-3)
    with pytest.raises(ConfigError):
        QuadratureRule(kind="trapezoid")
    with pytest.raises(ConfigError):
        McOracle(samples=0)
    with pytest.raises(DomainError):
        integrate_nested(lambda x, y: y, (0, 1), lambda x: (np.ones_like(x), np.zeros_like(x)))


@settings(max_examples=25, deadline=None)
@given(c=st.floats(-2, 2), k=st.floats(0.1, 3), b=st.floats(0.1, 4))
def test_doubling_panels_is_stable(c, k, b):
    f = lambda s: np.exp(c * s) * np.cos(k * s) + s ** 3
    coarse = integrate_1d(f, 0.0, b)
    fine = integrate_1d(f, 0.0, b, DEFAULT_RULE.refined())
    assert abs(coarse - fine) <= 1e-10 * max(1.0, abs(fine))


@settings(max_examples=25, deadline=None)
@given(a=st.floats(-3, 3), m=st.floats(0.01, 3), w=st.floats(0, 1))
def test_additivity(a, m, w):
    b = a + m
    c = a + w * m
    f = lambda s: np.cosh(s) ** 2
    whole = integrate_1d(f, a, b)
    split = integrate_1d(f, a, c) + integrate_1d(f, c, b)
    assert whole == pytest.approx(split, rel=1e-12, abs=1e-14)


def test_mc_constant_box():
    est, err = mc_estimate(lambda x, y: np.ones_like(x), Box((0, 0), (1, 1)), McOracle(100_000))
    assert est == 1.0 and err == 0.0


def test_mc_mean():
    est, err = mc_estimate(lambda s: s, Box((0,), (1,)), McOracle(1_000_000, 42))
    assert abs(est - 0.5) < 3 * err


def test_mc_matches_nested():
    f = lambda th, r: np.sin(th) * np.sinh(r) ** 2
    bounds = lambda th: (np.zeros_like(th), np.ones_like(th))
    quad = integrate_nested(f, (0, math.pi), bounds)
    est, err = mc_estimate(f, RadialRegion(0, math.pi, bounds, 0.0, 1.0), McOracle())
    assert abs(quad - est) < 3 * err


def test_mc_is_deterministic():
    f = lambda s: s * s
    assert mc_estimate(f, Box((0,), (1,)), McOracle(1000, 3)) == mc_estimate(f, Box((0,), (1,)), McOracle(1000, 3))
