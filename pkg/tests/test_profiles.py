import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from warpiso.core import Density, WarpedManifold
from warpiso.errors import DomainError, RangeError
from warpiso.profiles import (closed_h_f, cumulative, invert_monotone, profile_eval,
                              profile_function)

H1 = WarpedManifold.hyperbolic(1)
H2 = WarpedManifold.hyperbolic(2)
E1 = WarpedManifold.euclidean(1)
E2 = WarpedManifold.euclidean(2)
ADS = WarpedManifold.ads_schwarzschild(2, 1.0)
GAUSS = Density.exp_quadratic(0.5)


def test_cumulative_examples():
    assert cumulative(H1, Density(), 0.0, 1.0) == pytest.approx(math.pi, rel=1e-15)
    assert abs(cumulative(H1, GAUSS, 0.0, 1.0) - 2 * math.pi * (math.exp(0.5) - 1)) < 1e-9
    assert cumulative(H2, Density(), 0.0, 1.0) == pytest.approx(4 * math.pi / 3, rel=1e-15)


def test_inversion_examples():
    xi = profile_function("Xi", E1)
    assert invert_monotone(xi.table, math.pi) == pytest.approx(1.0, abs=1e-12)
    f0 = profile_function("F0Tilde", H1)
    assert abs(f0.invert(2 * math.pi * (math.cosh(1) - 1)) - 1.0) < 1e-10
    assert f0.invert(float(f0.F_table[-1])) == f0.t[-1]
    with pytest.raises(RangeError, match="outside"):
        f0.invert(2 * float(f0.F_table[-1]))


def test_profile_eval_examples():
    assert abs(profile_eval(profile_function("Psi", H1), math.pi) - 2 * math.pi * math.sqrt(2)) < 1e-9
    eta = profile_function("Eta", H1, GAUSS)
    assert abs(eta(4.0760365) - 2 * math.pi * (2 - math.exp(0.5))) < 1e-6
    assert abs(eta(2 * math.pi * (math.exp(0.5) - 1)) - 2 * math.pi * (2 - math.exp(0.5))) < 1e-8
    assert profile_function("Xi", E2)(4 * math.pi / 3) == pytest.approx(4 * math.pi, rel=1e-12)


def test_closed_h_f():
    assert abs(closed_h_f("H0Tilde", 1, 1.0) - 2 * math.pi * math.exp(-1) * math.sinh(1)) < 1e-12
    assert closed_h_f("H0", 1, 1.0) == pytest.approx(2 * math.pi * math.cosh(1) * math.sinh(1), rel=1e-15)
    assert closed_h_f("F0Tilde", 1, 0.0) == 0.0
    assert closed_h_f("F0", 2, 1.0) == pytest.approx(4 * math.pi * (math.sinh(2) / 4 - 0.5), rel=1e-13)


@pytest.mark.parametrize("kind,M,d", [
    ("Psi", H2, GAUSS), ("Xi", H2, Density.cosh_linear(1.0)), ("Eta", H1, GAUSS),
    ("PsiTilde", ADS, Density()), ("EtaHat", ADS, Density()), ("F0Tilde", H2, Density()),
])
def test_round_trip_on_grid(kind, M, d):
    pf = profile_function(kind, M, d)
    idx = np.arange(1, pf.t.size, 97)
    for i in idx:
        got = pf(float(pf.F_table[i]))
        assert got == pytest.approx(float(pf.G_table[i]), rel=1e-10, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(t=st.floats(0.05, 9.5))
def test_round_trip_off_grid(t):
    pf = profile_function("Psi", H2, GAUSS)
    v = cumulative(H2, GAUSS, 0.0, t)
    want = 4 * math.pi * math.exp(0.5 * t * t) * t * t * math.sqrt(t * t + 1)
    assert pf(v) == pytest.approx(want, rel=1e-10)


def test_psi_tilde_reduces_to_psi():
    a = profile_function("Psi", H2, GAUSS)
    b = profile_function("PsiTilde", H2, GAUSS)
    assert np.allclose(a.G_table, b.G_table, rtol=1e-12, atol=0)
    assert np.array_equal(a.F_table, b.F_table)


@pytest.mark.parametrize("M,d", [(H2, GAUSS), (ADS, Density()), (E2, Density.cosh_linear(1.0))])
def test_pythagorean_assembly(M, d):
    eta = profile_function("EtaTilde", M, d)
    xi = profile_function("XiTilde", M, d)
    psi = profile_function("PsiTilde", M, d)
    lhs = np.hypot(eta.G_table, xi.G_table)
    assert np.allclose(lhs, psi.G_table, rtol=1e-10, atol=0)


def test_cor_cosh_composite():
    # for phi = 1 in hyperbolic space the main profile equals the corollary's closed form
    psi = profile_function("Psi", H2)
    v = psi.F_table[1:]
    vw = 3 * v
    rhs = np.sqrt(vw ** 2 + (4 * math.pi) ** (2 / 3) * vw ** (4 / 3))
    assert np.allclose(psi.G_table[1:], rhs, rtol=1e-10)


def test_eta_hat_horizon_and_monotone():
    pf = profile_function("EtaHat", ADS)
    assert pf.t[0] == 1.0 and pf.F_table[0] == 0.0 and pf.G_table[0] == 0.0
    assert np.all(np.diff(pf.G_table) > 0)


def test_domain_errors():
    with pytest.raises(DomainError):
        profile_function("EtaHat", H2)
    with pytest.raises(DomainError):
        profile_function("Psi", ADS)
    with pytest.raises(DomainError):
        profile_function("H0", E2)
    with pytest.raises(DomainError):
        profile_function("Zeta", H2)
