"""Axially symmetric star-shaped hypersurfaces as radial graphs ``r = R(theta)``.

For ``n >= 2`` the polar angle ``theta`` runs over ``[0, pi]`` and integrals
over ``S^n`` reduce to ``omega_{n-1} int_0^pi (...) sin^{n-1}(theta) dtheta``.
For ``n = 1`` the graph is a closed curve and ``theta`` runs over
``[0, 2 pi]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .core import HYPERBOLIC, Density, WarpedManifold, sphere_area
from .errors import InvalidGeneratorError
from .quadrature import (DEFAULT_RULE, Box, McOracle, QuadratureRule, RadialRegion,
                         integrate_1d, integrate_nested, mc_estimate)

MARGIN = 1e-6
_CHECK_GRID = 2049


@dataclass(frozen=True)
class CenteredBall:
    r0: float | None = None
    rho0: float | None = None


@dataclass(frozen=True)
class Slice:
    r0: float | None = None
    rho0: float | None = None


@dataclass(frozen=True)
class Perturbed:
    """``R(theta) = r0 (1 + sum_k eps_k cos(k theta))``; ``coeffs[k-1]`` is ``eps_k``."""

    r0: float | None = None
    coeffs: tuple[float, ...] = ()
    rho0: float | None = None

    @classmethod
    def modes(cls, r0: float | None = None, rho0: float | None = None, **eps: float) -> "Perturbed":
        """``Perturbed.modes(1.0, eps2=0.1)``."""
        ks = {int(k.removeprefix("eps")): v for k, v in eps.items()}
        coeffs = [0.0] * max(ks, default=0)
        for k, v in ks.items():
            if k < 1:
                raise InvalidGeneratorError(f"mode index must be >= 1, got {k}")
            coeffs[k - 1] = float(v)
        return cls(r0=r0, coeffs=tuple(coeffs), rho0=rho0)


@dataclass(frozen=True)
class OffCenterBall:
    """Hyperbolic geodesic ball of radius ``radius`` centred at distance ``d`` on the axis."""

    radius: float
    d: float


Generator = Union[CenteredBall, Slice, Perturbed, OffCenterBall]


def _resolve_r0(gen, M: WarpedManifold) -> float:
    if (gen.r0 is None) == (gen.rho0 is None):
        raise InvalidGeneratorError(f"{type(gen).__name__} needs exactly one of r0, rho0")
    if gen.r0 is not None:
        return float(gen.r0)
    if gen.rho0 > M.lambda_max:
        raise InvalidGeneratorError(f"rho0={gen.rho0} exceeds lam(r_max)={M.lambda_max}")
    return float(M.rho_to_r(gen.rho0))


def _off_center_radius(theta, radius, d, iterations=64):
    """Solve ``cosh R cosh d - sinh R sinh d cos(theta) = cosh(radius)`` by bisection."""
    theta = np.asarray(theta, dtype=float)
    target = math.cosh(radius)
    lo = np.zeros_like(theta)
    hi = np.full_like(theta, radius + d)
    cd, sd, ct = math.cosh(d), math.sinh(d), np.cos(theta)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        f = np.cosh(mid) * cd - np.sinh(mid) * sd * ct - target
        neg = f < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class RadialProfile:
    generator: Generator
    n: int
    r0: float
    a: float = 0.0

    @property
    def theta_max(self) -> float:
        return 2.0 * math.pi if self.n == 1 else math.pi

    @property
    def is_centered(self) -> bool:
        """True for the equality cases: centred balls and radial slices."""
        g = self.generator
        if isinstance(g, (CenteredBall, Slice)):
            return True
        if isinstance(g, Perturbed):
            return not any(g.coeffs)
        return g.d == 0

    def R(self, theta):
        theta = np.asarray(theta, dtype=float)
        g = self.generator
        if isinstance(g, Perturbed):
            out = np.ones_like(theta)
            for k, eps in enumerate(g.coeffs, start=1):
                if eps:
                    out = out + eps * np.cos(k * theta)
            return self.r0 * out
        if isinstance(g, OffCenterBall):
            if g.d == 0:
                return np.full_like(theta, g.radius)
            return _off_center_radius(theta, g.radius, g.d)
        return np.full_like(theta, self.r0)

    def dR(self, theta):
        theta = np.asarray(theta, dtype=float)
        g = self.generator
        if isinstance(g, Perturbed):
            out = np.zeros_like(theta)
            for k, eps in enumerate(g.coeffs, start=1):
                if eps:
                    out = out - k * eps * np.sin(k * theta)
            return self.r0 * out
        if isinstance(g, OffCenterBall) and g.d != 0:
            R = self.R(theta)
            sd, cd = math.sinh(g.d), math.cosh(g.d)
            num = np.sinh(R) * sd * np.sin(theta)
            den = np.sinh(R) * cd - np.cosh(R) * sd * np.cos(theta)
            return -num / den
        return np.zeros_like(theta)


def make_profile(generator: Generator, M: WarpedManifold) -> RadialProfile:
    """Build a radial profile and check it stays inside ``[a, r_max - MARGIN]``."""
    if isinstance(generator, OffCenterBall):
        if M.kind != HYPERBOLIC:
            raise InvalidGeneratorError("OffCenterBall is only defined in hyperbolic space")
        if not (0 <= generator.d < generator.radius):
            raise InvalidGeneratorError(
                f"root not bracketed: need 0 <= d < radius, got d={generator.d}, radius={generator.radius}")
        r0 = float(generator.radius)
    elif isinstance(generator, (CenteredBall, Slice, Perturbed)):
        r0 = _resolve_r0(generator, M)
    else:
        raise InvalidGeneratorError(f"unknown generator {generator!r}")
    p = RadialProfile(generator, M.n, r0, M.a)
    theta = np.linspace(0.0, p.theta_max, _CHECK_GRID)
    R = p.R(theta)
    if np.min(R) < M.a - 1e-12 or np.max(R) > M.r_max - MARGIN:
        raise InvalidGeneratorError(
            f"profile leaves [a, r_max - {MARGIN}]: R in [{np.min(R)}, {np.max(R)}], r_max={M.r_max}")
    return p


# --- sphere integration ----------------------------------------------------

def sphere_weight(theta, n: int):
    """Reduced measure of ``S^n`` per unit polar angle."""
    if n == 1:
        return np.ones_like(theta)
    return sphere_area(n - 1) * np.sin(theta) ** (n - 1)


def sphere_integral(g: Callable[[np.ndarray], np.ndarray], n: int,
                    rule: QuadratureRule = DEFAULT_RULE) -> float:
    theta_max = 2.0 * math.pi if n == 1 else math.pi
    return integrate_1d(lambda th: g(th) * sphere_weight(th, n), 0.0, theta_max, rule)


def sphere_nested(f: Callable[[np.ndarray, np.ndarray], np.ndarray], n: int, inner_bounds,
                  rule: QuadratureRule = DEFAULT_RULE, inner_rule: QuadratureRule | None = None) -> float:
    theta_max = 2.0 * math.pi if n == 1 else math.pi
    return integrate_nested(lambda th, r: f(th, r) * sphere_weight(th, n),
                            (0.0, theta_max), inner_bounds, rule, inner_rule)


# --- functionals --------------------------------------------------------------

def support_function(p: RadialProfile, M: WarpedManifold, theta):
    """``u = lam(R)^2 / sqrt(lam(R)^2 + R'^2)``."""
    lam, _ = M.warp(p.R(theta))
    dR = p.dR(theta)
    return lam * lam / np.sqrt(lam * lam + dR * dR)


def area_integral(p: RadialProfile, M: WarpedManifold,
                  weight: Callable[..., np.ndarray],
                  rule: QuadratureRule = DEFAULT_RULE) -> float:
    """``int_Sigma weight(lam, lam', u) dmu`` with ``dmu = lam^{n-1} sqrt(lam^2 + R'^2) dsigma``."""
    n = p.n

    def g(theta):
        lam, dlam = M.warp(p.R(theta))
        dR = p.dR(theta)
        root = np.sqrt(lam * lam + dR * dR)
        u = lam * lam / root
        return weight(lam, dlam, u) * lam ** (n - 1) * root

    return sphere_integral(g, n, rule)


def volume_integral(p: RadialProfile, M: WarpedManifold,
                    weight: Callable[[np.ndarray, np.ndarray], np.ndarray],
                    rule: QuadratureRule = DEFAULT_RULE) -> float:
    """``int_Omega weight(lam, lam') dv`` with ``dv = lam^n dr dsigma``."""
    n = p.n

    def f(theta, r):
        lam, dlam = M.warp(r)
        return weight(lam, dlam) * lam ** n

    return sphere_nested(f, n, lambda th: (np.full_like(th, p.a), p.R(th)), rule)


def weighted_area(p: RadialProfile, M: WarpedManifold, d: Density,
                  rule: QuadratureRule = DEFAULT_RULE) -> float:
    return area_integral(p, M, lambda lam, dlam, u: d.phi(lam) * dlam, rule)


def weighted_volume(p: RadialProfile, M: WarpedManifold, d: Density,
                    rule: QuadratureRule = DEFAULT_RULE) -> float:
    return volume_integral(p, M, lambda lam, dlam: d.phi(lam) * dlam, rule)


def unweighted_volume(p: RadialProfile, M: WarpedManifold,
                      rule: QuadratureRule = DEFAULT_RULE) -> float:
    return volume_integral(p, M, lambda lam, dlam: np.ones_like(lam), rule)


@dataclass(frozen=True)
class SurfaceMeasures:
    weighted_area: float
    weighted_volume: float
    unweighted_volume: float


def measures(p: RadialProfile, M: WarpedManifold, d: Density,
             rule: QuadratureRule = DEFAULT_RULE) -> SurfaceMeasures:
    return SurfaceMeasures(weighted_area(p, M, d, rule),
                           weighted_volume(p, M, d, rule),
                           unweighted_volume(p, M, rule))


# --- Monte Carlo counterparts ------------------------------------------------

def mc_weighted_area(p: RadialProfile, M: WarpedManifold, d: Density,
                     oracle: McOracle) -> tuple[float, float]:
    n = p.n

    def f(theta):
        lam, dlam = M.warp(p.R(theta))
        dR = p.dR(theta)
        return d.phi(lam) * dlam * lam ** (n - 1) * np.sqrt(lam * lam + dR * dR) * sphere_weight(theta, n)

    return mc_estimate(f, Box((0.0,), (p.theta_max,)), oracle)


def mc_weighted_volume(p: RadialProfile, M: WarpedManifold, d: Density,
                       oracle: McOracle) -> tuple[float, float]:
    n = p.n
    r_hi = float(np.max(p.R(np.linspace(0.0, p.theta_max, _CHECK_GRID))))
    r_hi = min(r_hi * (1 + 1e-3) + 1e-9, M.r_max)

    def f(theta, r):
        lam, dlam = M.warp(r)
        return d.phi(lam) * dlam * lam ** n * sphere_weight(theta, n)

    region = RadialRegion(0.0, p.theta_max, lambda th: (np.full_like(th, p.a), p.R(th)), p.a, r_hi)
    return mc_estimate(f, region, oracle)
