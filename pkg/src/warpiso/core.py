"""Warped-product manifolds ``[a, r_max] x S^n`` and radial log-convex densities.

A manifold carries the warp function ``lam(r)`` and the derived maps

* ``Psi(rho) = lam'(lam^{-1}(rho))``
* ``Lambda(rho) = sqrt(Psi(rho)**2 - 1) / rho``

Three kinds are built in: hyperbolic space (``lam = sinh``), Euclidean space
(``lam(r) = r``) and the anti-de Sitter-Schwarzschild manifold of mass ``m``
whose warp function solves ``lam' = sqrt(1 + lam**2 - m lam**(1-n))`` from
``lam(a) = m**(1/(n+1))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, InvalidDensityError
from .quadrature import QuadratureRule, integrate_1d_many

HYPERBOLIC = "hyperbolic"
EUCLIDEAN = "euclidean"
ADS_SCHWARZSCHILD = "ads-schwarzschild"
MANIFOLD_KINDS = (HYPERBOLIC, EUCLIDEAN, ADS_SCHWARZSCHILD)

# relative slack used for range checks on [a, r_max] and [lam(a), lam(r_max)]
_EDGE = 1e-12
_TABLE_POINTS = 1025
_STEP_RULE = QuadratureRule(order=24, panels=1)


def sphere_area(n: int) -> float:
    """Area of the unit sphere S^n in R^{n+1}."""
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def chebyshev_points(lo: float, hi: float, count: int) -> np.ndarray:
    """Chebyshev-Lobatto points on ``[lo, hi]``, increasing, endpoints exact."""
    k = np.arange(count)
    t = 0.5 * (lo + hi) - 0.5 * (hi - lo) * np.cos(np.pi * k / (count - 1))
    t[0], t[-1] = lo, hi
    return t


@dataclass(frozen=True)
class WarpedManifold:
    n: int
    kind: str = HYPERBOLIC
    r_max: float = 3.0
    m: float = 0.0
    a: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"sphere dimension n must be an integer >= 1, got {self.n!r}")
        if self.kind not in MANIFOLD_KINDS:
            raise DomainError(f"unknown manifold kind {self.kind!r}")
        if self.m < 0:
            raise DomainError(f"mass must be non-negative, got {self.m}")
        if self.kind != ADS_SCHWARZSCHILD and self.m != 0:
            raise DomainError("a mass parameter only makes sense for ads-schwarzschild")
        if not self.r_max > self.a:
            raise DomainError(f"r_max={self.r_max} must exceed a={self.a}")

    @classmethod
    def hyperbolic(cls, n: int, r_max: float = 3.0) -> "WarpedManifold":
        return cls(n, HYPERBOLIC, r_max)

    @classmethod
    def euclidean(cls, n: int, r_max: float = 3.0) -> "WarpedManifold":
        return cls(n, EUCLIDEAN, r_max)

    @classmethod
    def ads_schwarzschild(cls, n: int, m: float, r_max: float = 3.0) -> "WarpedManifold":
        return cls(n, ADS_SCHWARZSCHILD, r_max, m)

    @property
    def omega_n(self) -> float:
        return sphere_area(self.n)

    @property
    def lambda_a(self) -> float:
        if self.kind == ADS_SCHWARZSCHILD:
            return self.m ** (1.0 / (self.n + 1))
        return 0.0

    @cached_property
    def lambda_max(self) -> float:
        return float(self.warp(self.r_max)[0])

    # --- closed forms in the rho = lam(r) variable -------------------------

    def _check_rho(self, rho, upper=None):
        rho = np.asarray(rho, dtype=float)
        lo = self.lambda_a
        if np.any(rho < lo - _EDGE * max(1.0, lo)) or np.any(~np.isfinite(rho)):
            raise DomainError(f"rho below lam(a)={lo}: min rho={np.min(rho)}")
        if upper is not None and np.any(rho > upper * (1 + _EDGE)):
            raise DomainError(f"rho above lam(r_max)={upper}: max rho={np.max(rho)}")
        return rho

    def _psi_sq(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.kind == HYPERBOLIC:
            return 1.0 + rho * rho
        if self.kind == EUCLIDEAN:
            return np.ones_like(rho)
        if self.m == 0.0:
            return 1.0 + rho * rho
        return 1.0 + rho * rho - self.m * rho ** (1.0 - self.n)

    def psi(self, rho):
        rho = self._check_rho(rho)
        return np.sqrt(np.maximum(self._psi_sq(rho), 1.0))

    def lambda_big(self, rho):
        rho = self._check_rho(rho)
        if np.any(rho <= 0):
            raise DomainError("Lambda is undefined at rho = 0")
        if self.kind == HYPERBOLIC:
            return np.ones_like(rho)
        if self.kind == EUCLIDEAN:
            return np.zeros_like(rho)
        if self.m == 0.0:
            return np.ones_like(rho)
        return np.sqrt(np.maximum(1.0 - self.m * rho ** (-(self.n + 1.0)), 0.0))

    def lambda_big_prime(self, rho):
        """Derivative of Lambda; infinite at the ads-schwarzschild horizon."""
        rho = self._check_rho(rho)
        if self.kind != ADS_SCHWARZSCHILD or self.m == 0.0:
            return np.zeros_like(rho)
        big = self.lambda_big(rho)
        with np.errstate(divide="ignore"):
            return self.m * (self.n + 1) / (2.0 * rho ** (self.n + 2) * big)

    # --- radial coordinate ------------------------------------------------

    @cached_property
    def _radial_table(self) -> tuple[np.ndarray, np.ndarray]:
        # lam' <= sqrt(1 + lam^2) for every kind, hence lam(r) <= sinh(r - a + asinh lam(a))
        lo = self.lambda_a
        hi = math.sinh(self.r_max - self.a + math.asinh(lo)) * (1 + 1e-9) + 1e-12
        rho = chebyshev_points(lo, hi, _TABLE_POINTS)
        steps = integrate_1d_many(lambda s: 1.0 / self.psi(s), rho[:-1], rho[1:], _STEP_RULE)
        r = np.empty_like(rho)
        r[0] = self.a
        for k in range(1, rho.size):
            r[k] = self.a + math.fsum(steps[:k])
        return rho, r

    def _rho_to_r(self, rho):
        table_rho, table_r = self._radial_table
        k = np.clip(np.searchsorted(table_rho, rho, side="right") - 1, 0, table_rho.size - 2)
        step = integrate_1d_many(lambda s: 1.0 / self.psi(s), table_rho[k], rho, _STEP_RULE)
        return table_r[k] + step

    def rho_to_r(self, rho):
        """Radial coordinate ``r`` with ``lam(r) = rho``, by quadrature of ``1/Psi``."""
        scalar = np.ndim(rho) == 0
        rho = self._check_rho(rho, self.lambda_max)
        rho = np.clip(rho, self.lambda_a, None)
        r = self._rho_to_r(np.atleast_1d(rho))
        return float(r[0]) if scalar else r.reshape(np.shape(rho))

    def _lambda_of_r(self, r):
        table_rho, table_r = self._radial_table
        rho = np.interp(r, table_r, table_rho)
        for _ in range(12):
            delta = (self._rho_to_r(rho) - r) * self.psi(rho)
            rho = np.maximum(rho - delta, self.lambda_a)
            if np.all(np.abs(delta) <= 4e-16 * np.maximum(1.0, rho)):
                break
        return rho

    def warp(self, r):
        """Return ``(lam(r), lam'(r))``."""
        scalar = np.ndim(r) == 0
        r = np.asarray(r, dtype=float)
        if np.any(r < self.a - _EDGE) or np.any(r > self.r_max * (1 + _EDGE)) or np.any(~np.isfinite(r)):
            raise DomainError(f"r outside [a, r_max] = [{self.a}, {self.r_max}]")
        if self.kind == HYPERBOLIC:
            lam, dlam = np.sinh(r - self.a), np.cosh(r - self.a)
        elif self.kind == EUCLIDEAN:
            lam, dlam = r - self.a, np.ones_like(r)
        else:
            flat = np.clip(r.ravel(), self.a, None)
            lam = self._lambda_of_r(flat).reshape(r.shape)
            dlam = self.psi(lam)
        if scalar:
            return float(lam), float(dlam)
        return lam, dlam


def warp_eval(M: WarpedManifold, r):
    return M.warp(r)


def psi_lambda(M: WarpedManifold, rho):
    return M.psi(rho)


def lambda_big(M: WarpedManifold, rho):
    return M.lambda_big(rho)


def rho_to_r(M: WarpedManifold, rho):
    return M.rho_to_r(rho)


# --- densities ---------------------------------------------------------------

CONSTANT = "constant"
EXP_QUADRATIC = "exp-quadratic"
COSH_LINEAR = "cosh-linear"
POWER_QUADRATIC = "power-quadratic"
PRODUCT = "product"
DENSITY_KINDS = (CONSTANT, EXP_QUADRATIC, COSH_LINEAR, POWER_QUADRATIC, PRODUCT)

LOGCONVEXITY_GRID = 1000
LOGCONVEXITY_TOL = 1e-12


@dataclass(frozen=True)
class Density:
    """Even, positive radial weight ``phi`` with analytic derivatives.

    ``param`` is the constant value for ``constant``, ``c`` for
    ``exp-quadratic`` (``exp(c t^2)``) and ``cosh-linear`` (``cosh(c t)``), and
    ``p`` for ``power-quadratic`` (``(1 + t^2)^p``).
    """

    kind: str = CONSTANT
    param: float = 1.0
    factors: tuple["Density", ...] = field(default=())
    T: float = math.inf

    def __post_init__(self):
        if self.kind not in DENSITY_KINDS:
            raise InvalidDensityError(f"unknown density kind {self.kind!r}")
        if self.kind == PRODUCT:
            if not self.factors:
                raise InvalidDensityError("a product density needs at least one factor")
        elif self.factors:
            raise InvalidDensityError(f"{self.kind} density takes no factors")
        if self.kind == CONSTANT and not self.param > 0:
            raise InvalidDensityError(f"constant density must be positive, got {self.param}")
        if self.kind in (EXP_QUADRATIC, COSH_LINEAR, POWER_QUADRATIC) and self.param < 0:
            raise InvalidDensityError(f"{self.kind} parameter must be >= 0, got {self.param}")
        if not self.T > 0:
            raise InvalidDensityError(f"validity bound T must be positive, got {self.T}")

    @classmethod
    def constant(cls, value: float = 1.0) -> "Density":
        return cls(CONSTANT, value)

    @classmethod
    def exp_quadratic(cls, c: float) -> "Density":
        return cls(EXP_QUADRATIC, c)

    @classmethod
    def cosh_linear(cls, c: float) -> "Density":
        return cls(COSH_LINEAR, c)

    @classmethod
    def power_quadratic(cls, p: float) -> "Density":
        return cls(POWER_QUADRATIC, p)

    @classmethod
    def product(cls, *factors: "Density") -> "Density":
        return cls(PRODUCT, 1.0, tuple(factors))

    @property
    def is_constant(self) -> bool:
        if self.kind == PRODUCT:
            return all(f.is_constant for f in self.factors)
        return self.kind == CONSTANT or self.param == 0

    def _t(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(np.abs(t) > self.T):
            raise DomainError(f"|t| exceeds the density's validity bound T={self.T}")
        return t

    def phi(self, t):
        t = self._t(t)
        c = self.param
        if self.kind == CONSTANT:
            return np.full_like(t, c)
        if self.kind == EXP_QUADRATIC:
            return np.exp(c * t * t)
        if self.kind == COSH_LINEAR:
            return np.cosh(c * t)
        if self.kind == POWER_QUADRATIC:
            return (1.0 + t * t) ** c
        out = np.ones_like(t)
        for f in self.factors:
            out = out * f.phi(t)
        return out

    def log_prime(self, t):
        """``(log phi)'``."""
        t = self._t(t)
        c = self.param
        if self.kind == CONSTANT:
            return np.zeros_like(t)
        if self.kind == EXP_QUADRATIC:
            return 2.0 * c * t
        if self.kind == COSH_LINEAR:
            return c * np.tanh(c * t)
        if self.kind == POWER_QUADRATIC:
            return 2.0 * c * t / (1.0 + t * t)
        return sum((f.log_prime(t) for f in self.factors), np.zeros_like(t))

    def log_second(self, t):
        """``(log phi)''``."""
        t = self._t(t)
        c = self.param
        if self.kind == CONSTANT:
            return np.zeros_like(t)
        if self.kind == EXP_QUADRATIC:
            return np.full_like(t, 2.0 * c)
        if self.kind == COSH_LINEAR:
            return (c / np.cosh(c * t)) ** 2
        if self.kind == POWER_QUADRATIC:
            t2 = t * t
            return 2.0 * c * (1.0 - t2) / (1.0 + t2) ** 2
        return sum((f.log_second(t) for f in self.factors), np.zeros_like(t))

    def dphi(self, t):
        t = self._t(t)
        c = self.param
        if self.kind == CONSTANT:
            return np.zeros_like(t)
        if self.kind == EXP_QUADRATIC:
            return 2.0 * c * t * np.exp(c * t * t)
        if self.kind == COSH_LINEAR:
            return c * np.sinh(c * t)
        if self.kind == POWER_QUADRATIC:
            return 2.0 * c * t * (1.0 + t * t) ** (c - 1.0)
        # product rule
        return self.phi(t) * self.log_prime(t)

    def monotonicity(self, t):
        """``(phi'(t) t / phi(t))' = (log phi)'' t + (log phi)'``."""
        return self.log_second(t) * np.asarray(t, dtype=float) + self.log_prime(t)


def density_eval(d: Density, t):
    """Return ``(phi(t), phi'(t))``."""
    phi, dphi = d.phi(t), d.dphi(t)
    if np.ndim(t) == 0:
        return float(phi), float(dphi)
    return phi, dphi


@dataclass(frozen=True)
class LogConvexityCertificate:
    T: float
    min_log_second: float
    min_monotonicity: float
    grid_points: int = LOGCONVEXITY_GRID
    tol: float = LOGCONVEXITY_TOL

    @property
    def valid(self) -> bool:
        return self.min_log_second >= -self.tol and self.min_monotonicity >= -self.tol

    def as_dict(self) -> dict:
        return {"T": self.T, "min_log_second": self.min_log_second,
                "min_monotonicity": self.min_monotonicity, "valid": self.valid}


def logconvexity_check(d: Density, T: float) -> LogConvexityCertificate:
    """Sample ``(log phi)''`` and ``(phi' t / phi)'`` on a grid over ``[0, T]``."""
    if not (T > 0 and math.isfinite(T)):
        raise DomainError(f"certificate bound T must be positive and finite, got {T}")
    t = np.linspace(0.0, T, LOGCONVEXITY_GRID)
    phi = d.phi(t)
    if np.any(~np.isfinite(phi)) or np.any(phi <= 0):
        raise InvalidDensityError(f"density is not positive and finite on [0, {T}]")
    return LogConvexityCertificate(
        T=float(T),
        min_log_second=float(np.min(d.log_second(t))),
        min_monotonicity=float(np.min(d.monotonicity(t))),
    )
