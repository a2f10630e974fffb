"""Implicitly defined monotone profile functions.

Every profile function has the shape ``G o F^{-1}`` where

    F(t) = omega_n int_{t0}^t phi(s) s^n ds

is a cumulative weighted volume of centred balls and ``G(t)`` is the
matching boundary quantity.  ``F`` is tabulated on 2049 Chebyshev points and
inverted by bisection inside the bracketing table cell.

Kinds (``t0 = lam(a)`` for the tilde/hat kinds, ``0`` otherwise):

=========  ===============================================
Psi        ``omega_n phi(t) t^n sqrt(t^2 + 1)``
Xi         ``omega_n phi(t) t^n``
XiTilde    ``omega_n phi(t) t^n``
Eta        ``omega_n int_0^t phi'(s) s^{n+1} ds``
EtaHat     ``omega_n int_{t0}^t Lambda(s) s^n ds`` (``phi = 1``)
PsiTilde   ``omega_n phi(t) t^n Psi(t)``
EtaTilde   ``omega_n phi(t) Lambda(t) t^{n+1}``
H0         ``omega_n cosh r sinh^n r``
H0Tilde    ``omega_n e^{-r} sinh^n r``
F0         ``omega_n int_0^r sinh^n``
F0Tilde    same as F0
=========  ===============================================

For the last four the table variable is the hyperbolic radius ``r`` and
``F = F0``.  EtaTilde is the boundary term of the divergence identity for
``phi(rho) Lambda(rho) x`` evaluated on the centred sphere of radius ``t``;
it is the choice that makes the symmetrisation step sharp on spheres.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import ADS_SCHWARZSCHILD, HYPERBOLIC, Density, WarpedManifold, chebyshev_points, sphere_area
from .errors import DomainError, RangeError
from .quadrature import (DEFAULT_RULE, OPEN_SINGULAR_LEFT, QuadratureRule, integrate_1d,
                         integrate_1d_many)

TABLE_POINTS = 2049

PSI = "Psi"
XI = "Xi"
XI_TILDE = "XiTilde"
ETA = "Eta"
ETA_TILDE = "EtaTilde"
ETA_HAT = "EtaHat"
PSI_TILDE = "PsiTilde"
H0 = "H0"
F0 = "F0"
H0_TILDE = "H0Tilde"
F0_TILDE = "F0Tilde"
KINDS = (PSI, XI, XI_TILDE, ETA, ETA_TILDE, ETA_HAT, PSI_TILDE, H0, F0, H0_TILDE, F0_TILDE)
_RADIUS_KINDS = (H0, F0, H0_TILDE, F0_TILDE)
_WARPED_KINDS = (XI_TILDE, ETA_TILDE, ETA_HAT, PSI_TILDE)


def cumulative(M: WarpedManifold, d: Density, t0: float, t, rule: QuadratureRule = DEFAULT_RULE):
    """``omega_n int_{t0}^t phi(s) s^n ds``."""
    n, omega = M.n, M.omega_n
    if np.any(np.asarray(t) < t0):
        raise DomainError(f"cumulative measure needs t >= t0={t0}")
    f = lambda s: omega * d.phi(s) * s ** n
    if np.ndim(t) == 0:
        return integrate_1d(f, t0, float(t), rule)
    return integrate_1d_many(f, t0, np.asarray(t, dtype=float), rule)


def closed_h_f(kind: str, n: int, r, rule: QuadratureRule = DEFAULT_RULE):
    """The radius functions ``h_0, f_0, h~_0, f~_0`` of geodesic balls in hyperbolic space."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("radius must be non-negative")
    omega = sphere_area(n)
    if kind == H0:
        out = omega * np.cosh(r) * np.sinh(r) ** n
    elif kind == H0_TILDE:
        out = omega * np.exp(-r) * np.sinh(r) ** n
    elif kind in (F0, F0_TILDE):
        out = integrate_1d_many(lambda s: omega * np.sinh(s) ** n, 0.0, np.atleast_1d(r), rule)
        out = out.reshape(r.shape)
    else:
        raise DomainError(f"{kind!r} is not one of {_RADIUS_KINDS}")
    return float(out) if out.ndim == 0 else out


def invert_monotone(table: "MonotoneTable", v: float) -> float:
    return table.invert(v)


@dataclass(frozen=True, eq=False)
class MonotoneTable:
    """Increasing ``F`` tabulated on ``t``, with an exact cell-local refinement.

    ``density(s)`` is the derivative of ``F``; inside a table cell ``F`` is
    recomputed as ``F[k] + int_{t[k]}^{s} density``.
    """

    t: np.ndarray
    F: np.ndarray
    density: object
    rule: QuadratureRule

    def value(self, s: float, k: int | None = None) -> float:
        if k is None:
            k = int(np.clip(np.searchsorted(self.t, s, side="right") - 1, 0, self.t.size - 2))
        return float(self.F[k]) + integrate_1d(self.density, float(self.t[k]), float(s), self.rule)

    def invert(self, v: float) -> float:
        v = float(v)
        lo_v, hi_v = float(self.F[0]), float(self.F[-1])
        slack = 1e-13 * max(1.0, abs(hi_v))
        if not (lo_v - slack <= v <= hi_v + slack) or not math.isfinite(v):
            raise RangeError(f"value {v!r} outside the table range [F(t_min), F(t_max)] = [{lo_v!r}, {hi_v!r}]")
        if v <= lo_v:
            return float(self.t[0])
        if v >= hi_v:
            return float(self.t[-1])
        k = int(np.clip(np.searchsorted(self.F, v, side="right") - 1, 0, self.t.size - 2))
        lo, hi = float(self.t[k]), float(self.t[k + 1])
        if self.F[k] == v:
            return lo
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if self.value(mid, k) < v:
                lo = mid
            else:
                hi = mid
        # pick the closer end of the final bracket
        return lo if abs(self.value(lo, k) - v) <= abs(self.value(hi, k) - v) else hi


@dataclass(frozen=True, eq=False)
class ProfileFunction:
    kind: str
    manifold: WarpedManifold
    density: Density
    t0: float
    table: MonotoneTable
    G_table: np.ndarray
    rule: QuadratureRule

    @property
    def t(self) -> np.ndarray:
        return self.table.t

    @property
    def F_table(self) -> np.ndarray:
        return self.table.F

    def G(self, t):
        """Right-hand side of the defining relation at the table variable ``t``."""
        return _G(self.kind, self.manifold, self.density, self.t0, t, self.rule)

    def invert(self, v: float) -> float:
        return self.table.invert(v)

    def __call__(self, v: float) -> float:
        return float(self.G(self.invert(v)))


def _F_density(kind, M, d):
    n, omega = M.n, M.omega_n
    if kind in _RADIUS_KINDS:
        return lambda s: omega * np.sinh(s) ** n
    if kind == ETA_HAT:
        return lambda s: omega * s ** n
    return lambda s: omega * d.phi(s) * s ** n


def _singular_rule(rule):
    return rule.with_kind(OPEN_SINGULAR_LEFT)


def _G(kind, M, d, t0, t, rule):
    n, omega = M.n, M.omega_n
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if kind == PSI:
        out = omega * d.phi(t) * t ** n * np.sqrt(t * t + 1.0)
    elif kind in (XI, XI_TILDE):
        out = omega * d.phi(t) * t ** n
    elif kind == PSI_TILDE:
        out = omega * d.phi(t) * t ** n * M.psi(t)
    elif kind == ETA_TILDE:
        out = np.zeros_like(t)
        pos = t > 0
        out[pos] = omega * d.phi(t[pos]) * M.lambda_big(t[pos]) * t[pos] ** (n + 1)
    elif kind == ETA:
        out = integrate_1d_many(lambda s: omega * d.dphi(s) * s ** (n + 1), t0, t, rule)
    elif kind == ETA_HAT:
        out = integrate_1d_many(lambda s: omega * M.lambda_big(s) * s ** n, t0, t, _singular_rule(rule))
    elif kind in _RADIUS_KINDS:
        out = closed_h_f(kind, n, t, rule)
    else:
        raise DomainError(f"unknown profile kind {kind!r}")
    out = np.asarray(out, dtype=float)
    return float(out[0]) if scalar else out


@lru_cache(maxsize=256)
def profile_function(kind: str, M: WarpedManifold, d: Density = Density(),
                     rule: QuadratureRule = DEFAULT_RULE, t_max: float | None = None) -> ProfileFunction:
    """Build (and cache) the tabulated profile function ``kind`` for ``(M, d)``."""
    if kind not in KINDS:
        raise DomainError(f"unknown profile kind {kind!r}; expected one of {KINDS}")
    if kind in _RADIUS_KINDS:
        if M.kind != HYPERBOLIC:
            raise DomainError(f"{kind} is defined for hyperbolic space only")
        t0 = 0.0
        hi = M.r_max if t_max is None else t_max
    else:
        if kind == ETA_HAT and M.kind != ADS_SCHWARZSCHILD:
            raise DomainError("EtaHat needs an ads-schwarzschild manifold")
        if kind in (PSI, XI, ETA) and M.lambda_a != 0.0:
            raise DomainError(f"{kind} integrates from t = 0; use the tilde kind when lam(a) > 0")
        t0 = M.lambda_a if kind in _WARPED_KINDS else 0.0
        hi = M.lambda_max if t_max is None else t_max
    if not hi > t0:
        raise DomainError(f"empty table range [{t0}, {hi}]")
    t = chebyshev_points(t0, hi, TABLE_POINTS)
    dens = _F_density(kind, M, d)
    F = integrate_1d_many(dens, t0, t, rule)
    if np.any(np.diff(F) <= 0):
        raise DomainError(f"cumulative table for {kind} is not strictly increasing")
    table = MonotoneTable(t, F, dens, QuadratureRule(rule.order, 1))
    G = _G(kind, M, d, t0, t, rule)
    return ProfileFunction(kind, M, d, t0, table, G, rule)


def profile_eval(pf: ProfileFunction, v: float) -> float:
    """``G(F^{-1}(v))``."""
    return pf(v)
