"""Composite Gauss-Legendre quadrature and a Monte Carlo cross-check.

Integrands are vectorised callables: they receive numpy arrays of nodes and
must return arrays of the same shape.  All reductions go through
:func:`math.fsum` in a fixed node order, so results do not depend on how or
where the integrand was evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, DomainError, EvaluationError

CLOSED_GAUSS = "closed-gauss"
OPEN_SINGULAR_LEFT = "open-singular-left"
_KINDS = (CLOSED_GAUSS, OPEN_SINGULAR_LEFT)


@lru_cache(maxsize=None)
def _legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule.

    ``open-singular-left`` integrates in ``u`` after the substitution
    ``s = a + u**2``, which turns an ``(s - a)**-0.5`` endpoint singularity
    into a smooth integrand.
    """

    order: int = 48
    panels: int = 4
    kind: str = CLOSED_GAUSS

    # fixed for open-singular-left
    exponent: float = 0.5

    def __post_init__(self):
        if not isinstance(self.order, (int, np.integer)) or self.order < 1:
            raise ConfigError(f"quadrature order must be a positive integer, got {self.order!r}")
        if not isinstance(self.panels, (int, np.integer)) or self.panels < 1:
            raise ConfigError(f"quadrature panels must be a positive integer, got {self.panels!r}")
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown quadrature kind {self.kind!r}; expected one of {_KINDS}")
        if self.exponent != 0.5:
            raise ConfigError("the singular substitution exponent is fixed at 1/2")

    def with_kind(self, kind: str) -> "QuadratureRule":
        return QuadratureRule(self.order, self.panels, kind)

    def refined(self) -> "QuadratureRule":
        return QuadratureRule(self.order, 2 * self.panels, self.kind)

    def coarsened(self) -> "QuadratureRule":
        if self.panels > 1:
            return QuadratureRule(self.order, self.panels // 2, self.kind)
        return QuadratureRule(max(1, self.order // 2), 1, self.kind)

    @property
    def npoints(self) -> int:
        return self.order * self.panels

    def nodes_weights(self, a, b) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights for ``[a, b]``.

        ``a`` and ``b`` may be arrays of equal shape ``S``; the result then has
        shape ``S + (npoints,)``.
        """
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        if self.kind == OPEN_SINGULAR_LEFT:
            hi = np.sqrt(np.maximum(b - a, 0.0))
            u, wu = _panel_nodes(self.order, self.panels, np.zeros_like(hi), hi)
            s = a[..., None] + u * u
            return s, 2.0 * u * wu
        return _panel_nodes(self.order, self.panels, a, b)


def _panel_nodes(order, panels, a, b):
    x, w = _legendre(order)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    h = (b - a) / panels
    k = np.arange(panels, dtype=float)
    # shape S + (panels, order)
    left = a[..., None, None] + h[..., None, None] * k[:, None]
    half = 0.5 * h[..., None, None]
    nodes = left + half * (x + 1.0)
    weights = half * w * np.ones_like(nodes)
    shape = a.shape + (order * panels,)
    return nodes.reshape(shape), weights.reshape(shape)


DEFAULT_RULE = QuadratureRule()


def fsum_rows(values: np.ndarray) -> np.ndarray:
    """Compensated sum over the last axis, row by row in fixed order."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        return np.array(math.fsum(values))
    flat = values.reshape(-1, values.shape[-1])
    out = np.fromiter((math.fsum(row) for row in flat), dtype=float, count=flat.shape[0])
    return out.reshape(values.shape[:-1])


def _checked(values, nodes, label="integrand"):
    values = np.broadcast_to(np.asarray(values, dtype=float), np.shape(nodes))
    bad = ~np.isfinite(values)
    if bad.any():
        idx = tuple(int(i[0]) for i in np.nonzero(bad))
        node = np.asarray(nodes)[idx]
        raise EvaluationError(f"{label} is not finite at node {float(node)!r} (value {values[idx]!r})")
    return values


def integrate_1d(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                 rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Integrate ``f`` over ``[a, b]``."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"integration limits must be finite, got [{a}, {b}]")
    if a > b:
        raise DomainError(f"integration limits are inverted: a={a} > b={b}")
    if a == b:
        return 0.0
    s, w = rule.nodes_weights(a, b)
    fs = _checked(f(s), s)
    return float(math.fsum(fs * w))


def integrate_1d_many(f: Callable[[np.ndarray], np.ndarray], a, b,
                      rule: QuadratureRule = DEFAULT_RULE) -> np.ndarray:
    """Integrate ``f`` over many intervals ``[a_i, b_i]`` at once."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if np.any(a > b):
        i = int(np.argmax(a > b))
        raise DomainError(f"integration limits are inverted at index {i}: {a.flat[i]} > {b.flat[i]}")
    out = np.zeros(a.shape)
    live = b > a
    if live.any():
        s, w = rule.nodes_weights(a[live], b[live])
        fs = _checked(f(s), s)
        out[live] = fsum_rows(fs * w)
    return out


def integrate_nested(f: Callable[[np.ndarray, np.ndarray], np.ndarray],
                     outer: Sequence[float],
                     inner_bounds: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
                     rule: QuadratureRule = DEFAULT_RULE,
                     inner_rule: QuadratureRule | None = None) -> float:
    """Tensor-product estimate of ``int_outer int_{lo(x)}^{hi(x)} f(x, y) dy dx``.

    ``inner_bounds`` maps the array of outer nodes to ``(lo, hi)`` arrays.
    """
    x0, x1 = (float(v) for v in outer)
    if x0 > x1:
        raise DomainError(f"outer interval is inverted: [{x0}, {x1}]")
    if x0 == x1:
        return 0.0
    inner_rule = inner_rule or rule
    x, wx = rule.nodes_weights(x0, x1)
    lo, hi = inner_bounds(x)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), x.shape)
    hi = np.broadcast_to(np.asarray(hi, dtype=float), x.shape)
    if np.any(hi < lo):
        i = int(np.argmax(hi < lo))
        raise DomainError(f"inner bounds inverted at outer node {x[i]!r}: [{lo[i]}, {hi[i]}]")
    # zero-length inner intervals contribute nothing and are never evaluated
    live = hi > lo
    inner = np.zeros_like(x)
    if live.any():
        y, wy = inner_rule.nodes_weights(lo[live], hi[live])
        xx = np.broadcast_to(x[live][:, None], y.shape)
        vals = _checked(f(xx, y), y)
        inner[live] = fsum_rows(vals * wy)
    return float(math.fsum(inner * wx))


# Monte Carlo oracle ---------------------------------------------------------

@dataclass(frozen=True)
class McOracle:
    samples: int = 1_000_000
    seed: int = 42

    def __post_init__(self):
        if not isinstance(self.samples, (int, np.integer)) or self.samples < 1:
            raise ConfigError(f"Monte Carlo needs a positive sample count, got {self.samples!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


@dataclass(frozen=True)
class Box:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @property
    def volume(self) -> float:
        return math.prod(u - l for l, u in zip(self.lower, self.upper))


@dataclass(frozen=True)
class RadialRegion:
    """``{(x, y): x in [x0, x1], lo(x) <= y <= hi(x)}`` inside a bounding box.

    ``y_min``/``y_max`` must bound the inner limits; points outside the region
    contribute zero, which keeps the estimate unbiased.
    """

    x0: float
    x1: float
    inner_bounds: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    y_min: float
    y_max: float

    @property
    def volume(self) -> float:
        return (self.x1 - self.x0) * (self.y_max - self.y_min)


def mc_estimate(f, region, oracle: McOracle) -> tuple[float, float]:
    """Uniform-sampling estimate of the integral of ``f`` and its standard error."""
    if oracle.samples < 1:
        raise ConfigError("Monte Carlo needs at least one sample")
    rng = np.random.default_rng(int(oracle.seed))
    n = int(oracle.samples)
    if isinstance(region, Box):
        lo = np.asarray(region.lower, dtype=float)
        hi = np.asarray(region.upper, dtype=float)
        pts = lo + (hi - lo) * rng.random((n, lo.size))
        vals = np.asarray(f(*pts.T), dtype=float) * np.ones(n)
    elif isinstance(region, RadialRegion):
        x = region.x0 + (region.x1 - region.x0) * rng.random(n)
        y = region.y_min + (region.y_max - region.y_min) * rng.random(n)
        lo, hi = region.inner_bounds(x)
        if np.any(np.asarray(hi) > region.y_max) or np.any(np.asarray(lo) < region.y_min):
            raise DomainError("radial region exceeds its bounding box")
        inside = (y >= lo) & (y <= hi)
        vals = np.zeros(n)
        if inside.any():
            vals[inside] = f(x[inside], y[inside])
    else:
        raise ConfigError(f"unsupported Monte Carlo region {type(region).__name__}")
    vol = region.volume
    mean = math.fsum(vals) / n
    if n > 1:
        var = math.fsum((vals - mean) ** 2) / (n - 1)
    else:
        var = 0.0
    return vol * mean, vol * math.sqrt(var / n)
