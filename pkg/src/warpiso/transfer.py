"""Projection ``(r, theta) -> lam(r) theta`` to Euclidean space and the transfer identities.

Each ``check_*`` function evaluates both sides of an identity through
separate parametrisations: the warped side integrates in ``r`` using
``lam(r)``, the Euclidean side integrates in ``rho`` using only ``Psi`` and
``Lambda``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import HYPERBOLIC, Density, WarpedManifold
from .errors import DomainError
from .quadrature import DEFAULT_RULE, QuadratureRule
from .report import DeficitReport, identity_report
from .surface import RadialProfile, area_integral, sphere_integral, sphere_nested, support_function

VOLUME_TOL = 1e-9
AREA_TOL = 1e-9
NORMAL_TOL = 1e-9
TANGENT_TOL = 1e-7
U_TOL = 1e-9
FD_STEP = 1e-5


@dataclass(frozen=True)
class EuclideanShadow:
    """Radial profile ``rho(theta) = lam(R(theta))`` of the projected surface."""

    profile: RadialProfile
    manifold: WarpedManifold

    @property
    def n(self) -> int:
        return self.profile.n

    @property
    def rho_inner(self) -> float:
        return self.manifold.lambda_a

    def rho(self, theta):
        return self.manifold.warp(self.profile.R(theta))[0]

    def drho(self, theta):
        _, dlam = self.manifold.warp(self.profile.R(theta))
        return dlam * self.profile.dR(theta)

    def rho_drho(self, theta):
        lam, dlam = self.manifold.warp(self.profile.R(theta))
        return lam, dlam * self.profile.dR(theta)

    def support(self, theta):
        rho, drho = self.rho_drho(theta)
        return rho * rho / np.sqrt(rho * rho + drho * drho)


def project(p: RadialProfile, M: WarpedManifold) -> EuclideanShadow:
    return EuclideanShadow(p, M)


def shadow_area_integral(shadow: EuclideanShadow, weight, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """``int weight(rho, uhat) dmuhat`` with ``dmuhat = rho^{n+1} / uhat dsigma``."""
    n = shadow.n

    def g(theta):
        rho, drho = shadow.rho_drho(theta)
        root = np.sqrt(rho * rho + drho * drho)
        uhat = rho * rho / root
        return weight(rho, uhat) * rho ** (n - 1) * root

    return sphere_integral(g, n, rule)


def shadow_volume_integral(shadow: EuclideanShadow, weight, rule: QuadratureRule = DEFAULT_RULE,
                           inner_rule: QuadratureRule | None = None) -> float:
    """``int_{Omegahat} weight(rho) dvhat`` over ``lam(a) <= rho <= rho(theta)``."""
    n = shadow.n
    inner = shadow.rho_inner
    return sphere_nested(lambda th, rho: weight(rho) * rho ** n, n,
                         lambda th: (np.full_like(th, inner), shadow.rho(th)), rule, inner_rule)


def check_volume_transfer(p: RadialProfile, M: WarpedManifold, d: Density,
                          rule: QuadratureRule = DEFAULT_RULE) -> DeficitReport:
    n = p.n
    warped = sphere_nested(
        lambda th, r: _warped_volume_integrand(M, d, r, n), n,
        lambda th: (np.full_like(th, p.a), p.R(th)), rule)
    shadow = project(p, M)
    euclid = shadow_volume_integral(shadow, d.phi, rule)
    return identity_report("VolumeTransfer", warped, euclid, VOLUME_TOL)


def _warped_volume_integrand(M, d, r, n):
    lam, dlam = M.warp(r)
    return d.phi(lam) * dlam * lam ** n


def check_area_transfer(p: RadialProfile, M: WarpedManifold, d: Density,
                        rule: QuadratureRule = DEFAULT_RULE) -> DeficitReport:
    warped = area_integral(p, M, lambda lam, dlam, u: d.phi(lam) * dlam, rule)
    shadow = project(p, M)
    big = M.lambda_big

    def weight(rho, uhat):
        lu = big(rho) * uhat
        return d.phi(rho) * np.sqrt(lu * lu + 1.0)

    euclid = shadow_area_integral(shadow, weight, rule)
    return identity_report("AreaTransfer", warped, euclid, AREA_TOL)


# --- Minkowski normal ---------------------------------------------------------

def minkowski(X, Y):
    """``sum_{i<=n} x_i y_i - x_{n+1} y_{n+1}`` over the last axis."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    return np.sum(X[..., :-1] * Y[..., :-1], axis=-1) - X[..., -1] * Y[..., -1]


def _direction(theta, dim, phi=0.0):
    """Unit vector at polar angle ``theta`` in R^dim, rotated by ``phi`` towards e_2."""
    e = np.zeros(np.shape(theta) + (dim,))
    e[..., 0] = np.cos(theta)
    if dim == 2:
        e[..., 1] = np.sin(theta)
    else:
        e[..., 1] = np.sin(theta) * np.cos(phi)
        e[..., 2] = np.sin(theta) * np.sin(phi)
    return e


def _embed(p: RadialProfile, theta, phi=0.0):
    r = p.R(theta)
    dim = p.n + 1
    return np.concatenate([np.sinh(r)[..., None] * _direction(theta, dim, phi), np.cosh(r)[..., None]], axis=-1)


def check_minkowski_normal(p: RadialProfile, M: WarpedManifold, theta=None) -> DeficitReport:
    """Check the normal assembled from the shadow is a unit normal of the hyperboloid surface.

    Tangent vectors are central-difference secants of the embedding along the
    meridian (and along the azimuth for ``n >= 2``).
    """
    if M.kind != HYPERBOLIC:
        raise DomainError("the Minkowski normal check needs the hyperbolic kind")
    if theta is None:
        theta = np.linspace(0.05, p.theta_max - 0.05, 33)
    theta = np.asarray(theta, dtype=float)
    dim = p.n + 1
    shadow = project(p, M)
    rho, drho = shadow.rho_drho(theta)
    e_r = _direction(theta, dim)
    e_t = np.zeros_like(e_r)
    e_t[..., 0] = -np.sin(theta)
    e_t[..., 1] = np.cos(theta)
    root = np.sqrt(rho * rho + drho * drho)
    nu_hat = (rho[..., None] * e_r - drho[..., None] * e_t) / root[..., None]
    uhat = rho * rho / root
    x = rho[..., None] * e_r
    dlam = np.sqrt(1.0 + rho * rho)
    nu = np.concatenate([nu_hat + uhat[..., None] * x, (dlam * uhat)[..., None]], axis=-1)
    nu = nu / np.sqrt(uhat * uhat + 1.0)[..., None]

    X = _embed(p, theta)
    on_surface = np.max(np.abs(minkowski(X, nu)))
    unit = np.max(np.abs(minkowski(nu, nu) - 1.0))

    h = FD_STEP
    tangents = [(_embed(p, theta + h) - _embed(p, theta - h)) / (2 * h)]
    if p.n >= 2:
        tangents.append((_embed(p, theta, h) - _embed(p, theta, -h)) / (2 * h))
    tangency = 0.0
    for T in tangents:
        norm = np.sqrt(np.maximum(minkowski(T, T), 1e-300))
        tangency = max(tangency, float(np.max(np.abs(minkowski(T, nu)) / norm)))

    violation = max(on_surface, unit, tangency)
    passed = on_surface < NORMAL_TOL and unit < NORMAL_TOL and tangency < TANGENT_TOL
    return DeficitReport(
        case="MinkowskiNormal", lhs=violation, rhs=0.0, deficit=violation, rel_deficit=violation,
        passed=passed, equality_expected=True, tol=TANGENT_TOL,
        details={"X_dot_nu": float(on_surface), "nu_dot_nu_minus_1": float(unit),
                 "tangency": float(tangency), "grid_points": int(theta.size)},
    )


def u_from_uhat_check(p: RadialProfile, M: WarpedManifold, theta=None) -> DeficitReport:
    """Compare the warped support function with its expression through the shadow's."""
    if theta is None:
        theta = np.linspace(0.0, p.theta_max, 65)
    theta = np.asarray(theta, dtype=float)
    u = support_function(p, M, theta)
    shadow = project(p, M)
    uhat = shadow.support(theta)
    lam = shadow.rho(theta)
    dlam = M.psi(lam)
    u_shadow = dlam * lam * uhat / np.sqrt(lam * lam + (dlam * dlam - 1.0) * uhat * uhat)
    rel = float(np.max(np.abs(u - u_shadow) / np.maximum(np.abs(u), 1e-300)))
    return DeficitReport(
        case="UFromUhat", lhs=float(np.max(u)), rhs=float(np.max(u_shadow)), deficit=rel,
        rel_deficit=rel, passed=rel < U_TOL, equality_expected=True, tol=U_TOL,
        details={"grid_points": int(theta.size)},
    )
