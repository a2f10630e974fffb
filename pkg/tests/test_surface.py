import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from warpiso.core import Density, WarpedManifold, sphere_area
from warpiso.errors import InvalidGeneratorError
from warpiso.quadrature import McOracle
from warpiso.surface import (CenteredBall, area_integral, OffCenterBall, Perturbed, Slice, make_profile,
                             mc_weighted_volume, support_function, unweighted_volume, weighted_area,
                             weighted_volume)

H1 = WarpedManifold.hyperbolic(1)
H2 = WarpedManifold.hyperbolic(2)
E2 = WarpedManifold.euclidean(2)
ADS = WarpedManifold.ads_schwarzschild(2, 1.0)
ONE = Density()


def test_ball_profile():
    p = make_profile(CenteredBall(1.0), H1)
    th = np.linspace(0, 2 * math.pi, 9)
    assert np.all(p.R(th) == 1.0) and np.all(p.dR(th) == 0.0)
    assert p.is_centered


def test_off_center_reduces_to_ball():
    p = make_profile(OffCenterBall(1.0, 0.0), H2)
    assert np.allclose(p.R(np.linspace(0, math.pi, 7)), 1.0, atol=1e-14)


def test_off_center_law_of_cosines():
    p = make_profile(OffCenterBall(1.0, 0.3), H2)
    assert abs(p.R(0.0) - 1.3) < 1e-10 and abs(p.R(math.pi) - 0.7) < 1e-10
    th = np.linspace(0, math.pi, 50)
    R = p.R(th)
    resid = np.cosh(R) * math.cosh(0.3) - np.sinh(R) * math.sinh(0.3) * np.cos(th) - math.cosh(1.0)
    assert np.max(np.abs(resid)) < 1e-12
    h = 1e-6
    fd = (p.R(th[1:-1] + h) - p.R(th[1:-1] - h)) / (2 * h)
    assert np.allclose(p.dR(th[1:-1]), fd, atol=1e-8)
    assert not p.is_centered


def test_support_function_examples():
    assert support_function(make_profile(CenteredBall(1.0), H1), H1, 0.3) == pytest.approx(math.sinh(1.0), rel=1e-14)
    assert support_function(make_profile(CenteredBall(2.0), E2), E2, 0.3) == pytest.approx(2.0)
    p = make_profile(Perturbed.modes(1.0, eps2=0.1), H2)
    th = math.pi / 4
    R, dR = 1.0 + 0.1 * math.cos(2 * th), -0.2 * math.sin(2 * th)
    lam = math.sinh(R)
    assert support_function(p, H2, th) == pytest.approx(lam * lam / math.sqrt(lam * lam + dR * dR), rel=1e-13)


def test_support_bounded_by_lambda():
    p = make_profile(Perturbed.modes(1.0, eps2=0.1, eps3=0.05), H2)
    th = np.linspace(0, math.pi, 101)
    lam = np.sinh(p.R(th))
    u = support_function(p, H2, th)
    assert np.all(u <= lam + 1e-15)
    flat = np.abs(p.dR(th)) < 1e-12
    assert np.allclose(u[flat], lam[flat], rtol=1e-14)
    assert np.all(u[~flat] < lam[~flat])


def test_weighted_area_examples():
    p = make_profile(CenteredBall(1.0), H1)
    assert abs(weighted_area(p, H1, ONE) - 2 * math.pi * math.sinh(1) * math.cosh(1)) < 1e-9
    assert weighted_area(make_profile(CenteredBall(1.0), E2), E2, ONE) == pytest.approx(4 * math.pi, rel=1e-13)
    s = make_profile(Slice(rho0=2.0), ADS)
    assert weighted_area(s, ADS, ONE) == pytest.approx(16 * math.pi * math.sqrt(4.5), rel=1e-10)


def test_volume_examples():
    p = make_profile(CenteredBall(1.0), H1)
    assert abs(weighted_volume(p, H1, ONE) - math.pi * math.sinh(1) ** 2) < 1e-9
    assert abs(unweighted_volume(p, H1) - 2 * math.pi * (math.cosh(1) - 1)) < 1e-9
    assert unweighted_volume(make_profile(CenteredBall(1.0), E2), E2) == pytest.approx(4 * math.pi / 3, rel=1e-13)


def test_off_center_keeps_volume_and_area():
    # an isometric copy of the centred ball
    p = make_profile(OffCenterBall(1.0, 0.3), H2)
    ball = make_profile(CenteredBall(1.0), H2)
    assert unweighted_volume(p, H2) == pytest.approx(unweighted_volume(ball, H2), rel=1e-9)
    unit = lambda lam, dlam, u: np.ones_like(lam)
    assert area_integral(p, H2, unit) == pytest.approx(sphere_area(2) * math.sinh(1.0) ** 2, rel=1e-9)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(1, 3), r0=st.floats(0.2, 2.5),
       d=st.sampled_from([Density(), Density.exp_quadratic(0.25), Density.cosh_linear(1.0)]))
def test_ball_closed_forms(n, r0, d):
    M = WarpedManifold.hyperbolic(n)
    p = make_profile(CenteredBall(r0), M)
    lam, dlam = math.sinh(r0), math.cosh(r0)
    area = sphere_area(n) * float(d.phi(lam)) * dlam * lam ** n
    assert weighted_area(p, M, d) == pytest.approx(area, rel=1e-9)
    if d.is_constant:
        assert weighted_volume(p, M, d) == pytest.approx(sphere_area(n) * lam ** (n + 1) / (n + 1), rel=1e-9)


@settings(max_examples=15, deadline=None)
@given(eps=st.floats(-0.2, 0.2), k=st.integers(1, 4))
def test_measures_positive(eps, k):
    p = make_profile(Perturbed.modes(1.0, **{f"eps{k}": eps}), H2)
    assert weighted_area(p, H2, ONE) > 0 and weighted_volume(p, H2, ONE) > 0


def test_euclidean_volume_against_monte_carlo():
    p = make_profile(Perturbed.modes(1.0, eps2=0.15), E2)
    quad = weighted_volume(p, E2, ONE)
    est, err = mc_weighted_volume(p, E2, ONE, McOracle(200_000, 5))
    assert abs(quad - est) < 3 * err


def test_generator_validation():
    with pytest.raises(InvalidGeneratorError):
        make_profile(CenteredBall(), H1)
    with pytest.raises(InvalidGeneratorError):
        make_profile(CenteredBall(r0=1.0, rho0=1.0), H1)
    with pytest.raises(InvalidGeneratorError, match="r_max"):
        make_profile(CenteredBall(3.5), H1)
    with pytest.raises(InvalidGeneratorError):
        make_profile(Perturbed.modes(1.0, eps1=-1.2), H1)
    with pytest.raises(InvalidGeneratorError, match="bracket"):
        make_profile(OffCenterBall(1.0, 1.5), H2)
    with pytest.raises(InvalidGeneratorError):
        make_profile(OffCenterBall(1.0, 0.3), E2)
