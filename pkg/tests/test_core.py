import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from warpiso.core import (Density, WarpedManifold, density_eval, lambda_big, logconvexity_check,
                          psi_lambda, rho_to_r, sphere_area, warp_eval)
from warpiso.errors import DomainError, InvalidDensityError

H1 = WarpedManifold.hyperbolic(1)
H2 = WarpedManifold.hyperbolic(2)
E2 = WarpedManifold.euclidean(2)
ADS = WarpedManifold.ads_schwarzschild(2, 1.0)


def test_sphere_area():
    assert sphere_area(1) == pytest.approx(2 * math.pi)
    assert sphere_area(2) == pytest.approx(4 * math.pi)
    assert sphere_area(3) == pytest.approx(2 * math.pi ** 2)


def test_warp_examples():
    lam, dlam = warp_eval(H1, 1.0)
    assert abs(lam - 1.1752012) < 1e-7 and abs(dlam - 1.5430806) < 1e-7
    assert tuple(map(float, warp_eval(E2, 2.0))) == (2.0, 1.0)
    lam, dlam = warp_eval(ADS, ADS.a)
    assert abs(lam - 1.0) < 1e-10 and abs(dlam - 1.0) < 1e-10


def test_psi_and_big_lambda():
    rho = math.sinh(1.0)
    assert psi_lambda(H1, rho) == pytest.approx(math.cosh(1.0), rel=1e-12)
    assert lambda_big(H1, rho) == pytest.approx(1.0, rel=1e-12)
    assert psi_lambda(E2, 0.8) == 1.0 and lambda_big(E2, 0.8) == 0.0
    assert psi_lambda(ADS, 2.0) == pytest.approx(math.sqrt(4.5), abs=1e-12)
    assert lambda_big(ADS, 2.0) == pytest.approx(math.sqrt(3.5) / 2, abs=1e-12)


def test_rho_to_r():
    assert abs(rho_to_r(H1, math.sinh(1.0)) - 1.0) < 1e-10
    assert rho_to_r(E2, 3.0) == pytest.approx(3.0, abs=1e-12)
    assert rho_to_r(ADS, ADS.lambda_a) == ADS.a


def test_out_of_range():
    with pytest.raises(DomainError):
        psi_lambda(ADS, 0.5)
    with pytest.raises(DomainError):
        warp_eval(H1, H1.r_max + 1.0)
    with pytest.raises(DomainError):
        lambda_big(H1, 0.0)


def test_hyperbolic_pythagoras():
    r = np.linspace(0, 3, 301)
    lam, dlam = warp_eval(H2, r)
    assert np.max(np.abs(dlam ** 2 - lam ** 2 - 1)) < 1e-12 * np.max(dlam ** 2)


def test_ads_structure_equation():
    r = np.linspace(ADS.a, ADS.r_max, 301)
    lam, dlam = warp_eval(ADS, r)
    resid = dlam ** 2 - 1 - lam ** 2 * (1 - lam ** -3)
    assert np.max(np.abs(resid)) < 1e-10 * np.max(dlam ** 2)


def test_ads_warp_solves_ode():
    # d lam / dr = Psi(lam): central difference of the inversion
    r = np.linspace(0.3, 2.5, 12)
    h = 1e-5
    slope = (warp_eval(ADS, r + h)[0] - warp_eval(ADS, r - h)[0]) / (2 * h)
    assert np.allclose(slope, warp_eval(ADS, r)[1], rtol=1e-8)


def test_big_lambda_prime_matches_difference():
    rho = np.linspace(1.2, 10.0, 40)
    h = 1e-6
    fd = (ADS.lambda_big(rho + h) - ADS.lambda_big(rho - h)) / (2 * h)
    exact = 3.0 / (2 * rho ** 4 * ADS.lambda_big(rho))
    assert np.allclose(ADS.lambda_big_prime(rho), exact, rtol=1e-14)
    assert np.allclose(fd, exact, rtol=1e-6)


@settings(max_examples=30, deadline=None)
@given(r=st.floats(0.0, 3.0))
def test_rho_to_r_inverts_warp(r):
    for M in (H2, ADS):
        rr = max(r, M.a)
        lam = float(warp_eval(M, rr)[0])
        assert rho_to_r(M, lam) == pytest.approx(rr, abs=1e-10)


def test_density_examples():
    assert tuple(map(float, density_eval(Density(), 0.7))) == (1.0, 0.0)
    phi, dphi = density_eval(Density.exp_quadratic(0.5), 1.0)
    assert abs(phi - math.exp(0.5)) < 1e-12 and abs(dphi - math.exp(0.5)) < 1e-12
    assert tuple(map(float, density_eval(Density.cosh_linear(1.0), 0.0))) == (1.0, 0.0)


@settings(max_examples=30, deadline=None)
@given(t=st.floats(-3, 3), c=st.floats(0, 1.5))
def test_density_derivatives(t, c):
    h = 1e-6
    for d in (Density.exp_quadratic(c), Density.cosh_linear(c), Density.power_quadratic(c),
              Density.product(Density.exp_quadratic(c), Density.cosh_linear(1.0))):
        fd = (float(d.phi(t + h)) - float(d.phi(t - h))) / (2 * h)
        assert float(d.dphi(t)) == pytest.approx(fd, rel=1e-6, abs=1e-6)
        lp = (math.log(d.phi(t + h)) - math.log(d.phi(t - h))) / (2 * h)
        assert float(d.log_prime(t)) == pytest.approx(lp, rel=1e-6, abs=1e-6)


def test_logconvexity_certificates():
    for d in (Density(), Density.exp_quadratic(0.5), Density.cosh_linear(1.0),
              Density.product(Density.constant(2.0), Density.exp_quadratic(0.25))):
        cert = logconvexity_check(d, 5.0)
        assert cert.valid and cert.min_monotonicity >= -1e-12
    bad = logconvexity_check(Density.power_quadratic(1.0), 3.0)
    assert not bad.valid and bad.min_log_second < 0


def test_density_validation():
    with pytest.raises(InvalidDensityError):
        Density.constant(0.0)
    with pytest.raises(InvalidDensityError):
        Density("gamma")
    with pytest.raises(DomainError):
        Density("exp-quadratic", 1.0, (), 2.0).phi(3.0)
