"""Inequality checks as signed deficits, sweeps, and a simplex sharpness search.

Every check returns a :class:`~warpiso.report.DeficitReport`.  When a
hypothesis of the underlying theorem fails (a density that is not
log-convex, a warp function whose ``Lambda`` is not admissible) the report
carries status ``hypothesis-violated`` instead of failing silently.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .core import (ADS_SCHWARZSCHILD, HYPERBOLIC, Density, WarpedManifold, logconvexity_check)
from .errors import DomainError, WarpisoError
from .profiles import (ETA, ETA_HAT, F0_TILDE, H0, H0_TILDE, PSI, PSI_TILDE, XI, XI_TILDE,
                       cumulative, profile_function)
from .quadrature import DEFAULT_RULE, OPEN_SINGULAR_LEFT, McOracle, QuadratureRule
from .report import (DEFAULT_EQUALITY_TOL, HYPOTHESIS_VIOLATED, OK, DeficitReport, error_report,
                     identity_report, inequality_report)
from .surface import (Perturbed, RadialProfile, area_integral, make_profile, mc_weighted_area,
                      mc_weighted_volume, volume_integral, weighted_area, weighted_volume,
                      unweighted_volume)
from .transfer import (EuclideanShadow, check_area_transfer, check_minkowski_normal,
                       check_volume_transfer, project, shadow_area_integral, shadow_volume_integral,
                       u_from_uhat_check)

ADSS_TOL = 1e-6
IDENTITY_TOL = 1e-9

HYPERBOLIC_CASES = ("MainThm", "CorCosh", "CorCoshMinusU", "CorH0", "LemSym", "LemVolW")
EUCLIDEAN_CASES = ("ThmC", "Lem32", "JensenStep", "Divergence")
TRANSFER_CASES = ("VolumeTransfer", "AreaTransfer", "MinkowskiNormal", "UFromUhat")
CASES = HYPERBOLIC_CASES + ("Warped", "AdSS") + EUCLIDEAN_CASES + TRANSFER_CASES

_DENSITY_CASES = {"MainThm", "LemSym", "Warped", "ThmC", "Lem32"}
_STAR_SHAPED_NOTE = "only star-shaped domains are represented"


def _certificate(M: WarpedManifold, d: Density):
    return logconvexity_check(d, M.lambda_max)


def _status(ok: bool) -> str:
    return OK if ok else HYPOTHESIS_VIOLATED


# --- hyperbolic space -------------------------------------------------------

def _hyperbolic_sides(case, p, M, d, rule):
    n, omega = M.n, M.omega_n
    one = Density.constant()
    info = {}
    if case == "MainThm":
        lhs = weighted_area(p, M, d, rule)
        vol = weighted_volume(p, M, d, rule)
        rhs = profile_function(PSI, M, d, rule)(vol)
        info["weighted_volume"] = vol
    elif case == "CorCosh":
        lhs = weighted_area(p, M, one, rule)
        vw = (n + 1) * weighted_volume(p, M, one, rule)
        rhs = math.sqrt(vw * vw + omega ** (2.0 / (n + 1)) * vw ** (2.0 * n / (n + 1)))
        info["weighted_volume"] = vw / (n + 1)
    elif case == "CorCoshMinusU":
        lhs = area_integral(p, M, lambda lam, dlam, u: dlam - u, rule)
        vol = unweighted_volume(p, M, rule)
        rhs = profile_function(H0_TILDE, M, one, rule)(vol)
        info["volume"] = vol
    elif case == "CorH0":
        lhs = weighted_area(p, M, one, rule)
        vol = unweighted_volume(p, M, rule)
        rhs = profile_function(H0, M, one, rule)(vol)
        info["volume"] = vol
    elif case == "LemSym":
        lhs = volume_integral(p, M, lambda lam, dlam: d.dphi(lam) * dlam * lam, rule)
        vol = weighted_volume(p, M, d, rule)
        rhs = profile_function(ETA, M, d, rule)(vol)
        info["weighted_volume"] = vol
    elif case == "LemVolW":
        lhs = weighted_volume(p, M, one, rule)
        vol = unweighted_volume(p, M, rule)
        r_omega = profile_function(F0_TILDE, M, one, rule).invert(vol)
        rhs = omega * math.sinh(r_omega) ** (n + 1) / (n + 1)
        info.update(volume=vol, r_omega=r_omega)
    else:
        raise DomainError(f"unknown hyperbolic case {case!r}")
    return lhs, rhs, info


def check_hyperbolic(case: str, p: RadialProfile, M: WarpedManifold, d: Density = Density(),
                     rule: QuadratureRule = DEFAULT_RULE, *, tol: float = DEFAULT_EQUALITY_TOL,
                     tol_ineq: float | None = None) -> DeficitReport:
    if M.kind != HYPERBOLIC:
        raise DomainError(f"{case} is a statement about hyperbolic space")
    status, info = OK, {}
    if case in _DENSITY_CASES:
        cert = _certificate(M, d)
        status = _status(cert.valid)
        info["certificate"] = cert.as_dict()
    lhs, rhs, sides = _hyperbolic_sides(case, p, M, d, rule)
    equality = p.is_centered
    return inequality_report(case, lhs, rhs, tol=tol, tol_ineq=tol_ineq, equality_expected=equality,
                             status=status, **info, **sides)


# --- warped products --------------------------------------------------------

@dataclass(frozen=True)
class WarpedHypotheses:
    min_lambda_prime: float
    min_lambda_prime_t_prime: float
    min_symmetrisation: float
    certificate: dict

    @property
    def valid(self) -> bool:
        return (self.min_lambda_prime >= -1e-10 and self.min_lambda_prime_t_prime >= -1e-8
                and self.min_symmetrisation >= -1e-8 and self.certificate["valid"])

    def as_dict(self) -> dict:
        return {"min_Lambda_prime": self.min_lambda_prime,
                "min_Lambda_prime_t_prime": self.min_lambda_prime_t_prime,
                "min_symmetrisation": self.min_symmetrisation,
                "certificate": self.certificate, "valid": self.valid}


def warped_hypotheses(M: WarpedManifold, d: Density, points: int = 400) -> WarpedHypotheses:
    """Sample the conditions on ``Lambda`` and ``phi`` needed by the warped-product inequality.

    Checked on an open grid over ``(lam(a), lam(r_max)]``: ``Lambda' >= 0``,
    ``(Lambda' t)' >= 0`` and ``(log phi)'' Lambda t + (log phi)' (Lambda t)' + (Lambda' t)' >= 0``.
    """
    lo, hi = M.lambda_a, M.lambda_max
    h = 1e-5 * (hi - lo)
    t = np.linspace(lo + 2 * h, hi - h, points)
    t = t[t > 0]
    big = M.lambda_big(t)
    dbig = M.lambda_big_prime(t)
    # central difference of Lambda'(t) t
    g = lambda s: M.lambda_big_prime(s) * s
    dg = (g(t + h) - g(t - h)) / (2 * h) if hi > lo + 3 * h else np.zeros_like(t)
    sym = d.log_second(t) * big * t + d.log_prime(t) * (dbig * t + big) + dg
    cert = _certificate(M, d).as_dict()
    return WarpedHypotheses(float(np.min(dbig)), float(np.min(dg)), float(np.min(sym)), cert)


def check_warped(p: RadialProfile, M: WarpedManifold, d: Density = Density(),
                 rule: QuadratureRule = DEFAULT_RULE, *, tol: float = DEFAULT_EQUALITY_TOL,
                 tol_ineq: float | None = None) -> DeficitReport:
    hyp = warped_hypotheses(M, d)
    lhs = weighted_area(p, M, d, rule)
    vol = weighted_volume(p, M, d, rule)
    rhs = profile_function(PSI_TILDE, M, d, rule)(vol)
    return inequality_report("Warped", lhs, rhs, tol=tol, tol_ineq=tol_ineq,
                             equality_expected=p.is_centered, status=_status(hyp.valid),
                             hypotheses=hyp.as_dict(), weighted_volume=vol)


# --- anti-de Sitter-Schwarzschild -------------------------------------------

def check_adss(p: RadialProfile, M: WarpedManifold, rule: QuadratureRule = DEFAULT_RULE, *,
               tol: float = ADSS_TOL, tol_ineq: float | None = None) -> DeficitReport:
    if M.kind != ADS_SCHWARZSCHILD or not M.m > 0:
        raise DomainError("AdSS needs an ads-schwarzschild manifold with m > 0")
    n, m, omega = M.n, M.m, M.omega_n
    one = Density.constant()
    area = weighted_area(p, M, one, rule)
    vol_w = weighted_volume(p, M, one, rule)
    eta_hat = profile_function(ETA_HAT, M, one, rule)(vol_w)
    # 1/(rho^{n+1} Lambda) blows up like (rho - rho_h)^{-1/2} at the horizon
    big = M.lambda_big
    singular = shadow_volume_integral(project(p, M), lambda rho: 1.0 / (rho ** (n + 1) * big(rho)),
                                      rule, rule.with_kind(OPEN_SINGULAR_LEFT))
    term1 = (n + 1) * eta_hat + 0.5 * m * (n + 1) * singular
    term2 = ((n + 1) * omega ** (1.0 / n) * vol_w + omega ** ((n + 1.0) / n) * m) ** (2.0 * n / (n + 1))
    return inequality_report("AdSS", area * area, term1 * term1 + term2, tol=tol, tol_ineq=tol_ineq,
                             equality_expected=p.is_centered, weighted_area=area,
                             weighted_volume=vol_w, eta_hat=eta_hat, singular_integral=singular)


# --- Euclidean shadow ----------------------------------------------------------

def check_euclidean(case: str, shadow: EuclideanShadow, d: Density = Density(),
                    rule: QuadratureRule = DEFAULT_RULE, *, tol: float = DEFAULT_EQUALITY_TOL,
                    tol_ineq: float | None = None) -> DeficitReport:
    M = shadow.manifold
    n, omega = M.n, M.omega_n
    rho_a = M.lambda_a
    equality = shadow.profile.is_centered
    status, info = OK, {}
    if case in _DENSITY_CASES:
        cert = _certificate(M, d)
        status = _status(cert.valid)
        info["certificate"] = cert.as_dict()
    if case == "ThmC":
        lhs = shadow_area_integral(shadow, lambda rho, uhat: d.phi(rho), rule)
        vol = shadow_volume_integral(shadow, d.phi, rule)
        if rho_a > 0:
            vol += cumulative(M, d, 0.0, rho_a, rule)
        E = WarpedManifold.euclidean(n, r_max=M.lambda_max)
        rhs = profile_function(XI, E, d, rule)(vol)
        info["weighted_volume"] = vol
    elif case == "Lem32":
        lhs = shadow_area_integral(shadow, lambda rho, uhat: d.phi(rho), rule)
        vol = shadow_volume_integral(shadow, d.phi, rule)
        rhs = profile_function(XI_TILDE, M, d, rule)(vol)
        equality = False
        info.update(weighted_volume=vol, equality_diagnosis="equality case not asserted")
    elif case == "JensenStep":
        big = M.lambda_big
        lhs = shadow_area_integral(
            shadow, lambda rho, uhat: d.phi(rho) * np.sqrt((big(rho) * uhat) ** 2 + 1.0), rule)
        first = shadow_area_integral(shadow, lambda rho, uhat: d.phi(rho) * big(rho) * uhat, rule)
        second = shadow_area_integral(shadow, lambda rho, uhat: d.phi(rho), rule)
        rhs = math.hypot(first, second)
        info.update(support_moment=first, euclidean_weighted_area=second)
    elif case == "Divergence":
        flux = shadow_area_integral(shadow, lambda rho, uhat: d.phi(rho) * uhat, rule)
        inner = omega * float(d.phi(rho_a)) * rho_a ** (n + 1)
        source = shadow_volume_integral(shadow, lambda rho: (n + 1) * d.phi(rho) + d.dphi(rho) * rho, rule)
        return identity_report("Divergence", flux - inner, source, IDENTITY_TOL, scale=abs(flux),
                               boundary_flux=flux, inner_sphere_flux=inner)
    else:
        raise DomainError(f"unknown Euclidean case {case!r}")
    return inequality_report(case, lhs, rhs, tol=tol, tol_ineq=tol_ineq, equality_expected=equality,
                             status=status, **info)


# --- Monte Carlo oracle ----------------------------------------------------------

MC_SIGMAS = 3.0


def check_monte_carlo(p: RadialProfile, M: WarpedManifold, d: Density = Density(),
                      oracle: McOracle = McOracle(), rule: QuadratureRule = DEFAULT_RULE
                      ) -> list[DeficitReport]:
    """Quadrature against Monte Carlo for the weighted area and volume.

    Passes when the two agree within three standard errors (plus roundoff,
    for integrands that are constant on the sample space).
    """
    out = []
    for case, quad, mc in (("MonteCarloArea", weighted_area, mc_weighted_area),
                           ("MonteCarloVolume", weighted_volume, mc_weighted_volume)):
        q = quad(p, M, d, rule)
        est, err = mc(p, M, d, oracle)
        gap = q - est
        bound = MC_SIGMAS * err + 1e-12 * abs(q)
        rel = gap / abs(q) if q else 0.0
        out.append(DeficitReport(case, q, est, gap, rel, abs(gap) <= bound, True, bound, OK, err,
                                 {"stderr": err, "sigmas": abs(gap) / err if err > 0 else 0.0,
                                  "samples": oracle.samples, "seed": oracle.seed}))
    return out


# --- dispatch ----------------------------------------------------------------------

def evaluate_case(case: str, p: RadialProfile, M: WarpedManifold, d: Density = Density(),
                  rule: QuadratureRule = DEFAULT_RULE, *, tol: float | None = None,
                  tol_ineq: float | None = None, estimate_error: bool = False) -> DeficitReport:
    """Run check ``case`` on profile ``p``.

    With ``estimate_error`` the check is repeated with a coarser rule and the
    change in the deficit is reported as the quadrature error estimate.
    """
    rep = _evaluate(case, p, M, d, rule, tol, tol_ineq)
    if estimate_error and case not in ("MinkowskiNormal", "UFromUhat"):
        coarse = _evaluate(case, p, M, d, rule.coarsened(), tol, tol_ineq)
        rep = replace(rep, error_estimate=abs(rep.deficit - coarse.deficit))
    if not rep.details.get("note"):
        rep = rep.with_details(note=_STAR_SHAPED_NOTE)
    return rep


def _evaluate(case, p, M, d, rule, tol, tol_ineq):
    kw = {"tol_ineq": tol_ineq}
    if case in HYPERBOLIC_CASES:
        return check_hyperbolic(case, p, M, d, rule, tol=tol or DEFAULT_EQUALITY_TOL, **kw)
    if case == "Warped":
        return check_warped(p, M, d, rule, tol=tol or DEFAULT_EQUALITY_TOL, **kw)
    if case == "AdSS":
        return check_adss(p, M, rule, tol=max(tol or 0.0, ADSS_TOL), **kw)
    if case in EUCLIDEAN_CASES:
        return check_euclidean(case, project(p, M), d, rule, tol=tol or DEFAULT_EQUALITY_TOL, **kw)
    if case == "VolumeTransfer":
        return check_volume_transfer(p, M, d, rule)
    if case == "AreaTransfer":
        return check_area_transfer(p, M, d, rule)
    if case == "MinkowskiNormal":
        return check_minkowski_normal(p, M)
    if case == "UFromUhat":
        return u_from_uhat_check(p, M)
    raise DomainError(f"unknown case {case!r}; expected one of {CASES}")


def chain(p: RadialProfile, M: WarpedManifold, d: Density = Density(),
          rule: QuadratureRule = DEFAULT_RULE) -> list[DeficitReport]:
    """The links of the hyperbolic proof, each reported separately."""
    shadow = project(p, M)
    return [check_euclidean("JensenStep", shadow, d, rule),
            check_euclidean("Divergence", shadow, d, rule),
            check_euclidean("ThmC", shadow, d, rule),
            check_hyperbolic("LemSym", p, M, d, rule),
            check_hyperbolic("MainThm", p, M, d, rule)]


# --- sweeps --------------------------------------------------------------------

def _threads() -> int:
    try:
        return max(1, int(os.environ.get("WARPISO_THREADS", "1")))
    except ValueError:
        return 1


def sweep(case: str, grid: Sequence, M: WarpedManifold, d: Density = Density(),
          rule: QuadratureRule = DEFAULT_RULE, **kwargs) -> list[DeficitReport]:
    """Evaluate ``case`` at every generator in ``grid``; output order follows ``grid``.

    A point that raises becomes an ``error`` report and the sweep continues.
    """

    def one(index_gen):
        index, gen = index_gen
        try:
            p = make_profile(gen, M)
            rep = evaluate_case(case, p, M, d, rule, **kwargs)
        except WarpisoError as exc:
            rep = error_report(case, str(exc))
        return rep.with_details(grid_index=index, generator=repr(gen))

    points = list(enumerate(grid))
    workers = _threads()
    if workers == 1 or len(points) < 2:
        return [one(pt) for pt in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, points))


# --- sharpness search ------------------------------------------------------------

PENALTY = 1.0


@dataclass
class SearchResult:
    best: tuple[float, ...]
    best_deficit: float
    evaluations: int
    trace: list[dict] = field(default_factory=list)


def _perturbed(x, modes, use_rho):
    coeffs = [0.0] * max(modes, default=0)
    for k, eps in zip(modes, x[1:]):
        coeffs[k - 1] = float(eps)
    if use_rho:
        return Perturbed(rho0=float(x[0]), coeffs=tuple(coeffs))
    return Perturbed(r0=float(x[0]), coeffs=tuple(coeffs))


def minimize_deficit(case: str, M: WarpedManifold, d: Density = Density(), modes: Sequence[int] = (2,),
                     start: Sequence[float] = (1.0, 0.1), budget: int = 200,
                     rule: QuadratureRule = DEFAULT_RULE, use_rho: bool = False) -> SearchResult:
    """Nelder-Mead search over ``Perturbed(r0, eps_k for k in modes)`` minimising the relative deficit.

    ``start`` is ``(r0, eps_{modes[0]}, ...)``.  Exactly ``min(budget, ...)``
    deficit evaluations are made; failures score :data:`PENALTY`.
    """
    if budget < 1:
        raise DomainError("budget must be at least one evaluation")
    modes = tuple(int(k) for k in modes)
    x0 = np.asarray(start, dtype=float)
    if x0.size != len(modes) + 1:
        raise DomainError(f"start needs {len(modes) + 1} values (r0 and one per mode)")
    trace: list[dict] = []

    def f(x):
        try:
            p = make_profile(_perturbed(x, modes, use_rho), M)
            value = evaluate_case(case, p, M, d, rule).rel_deficit
            note = None
            if not math.isfinite(value):
                value, note = PENALTY, "non-finite deficit"
        except WarpisoError as exc:
            value, note = PENALTY, str(exc)
        entry = {"x": [float(v) for v in x], "deficit": float(value)}
        if note:
            entry["error"] = note
        trace.append(entry)
        return float(value)

    xs, fs = nelder_mead(f, x0, budget)
    i = int(np.argmin(fs))
    return SearchResult(tuple(float(v) for v in xs[i]), float(fs[i]), len(trace), trace)


def nelder_mead(f: Callable[[np.ndarray], float], x0: np.ndarray, budget: int,
                step: float = 0.1) -> tuple[list[np.ndarray], list[float]]:
    """Reflect/expand/contract/shrink simplex iteration with a hard evaluation budget.

    Returns every simplex vertex evaluated last; the caller picks the best.
    """
    dim = x0.size
    evals = 0

    def call(x):
        nonlocal evals
        evals += 1
        return f(x)

    simplex = [x0.copy()]
    values = [call(x0)]
    for i in range(dim):
        if evals >= budget:
            return simplex, values
        x = x0.copy()
        x[i] += step * abs(x[i]) if x[i] != 0 else 0.25 * step
        simplex.append(x)
        values.append(call(x))

    while evals < budget:
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = call(xr)
        if fr < values[0]:
            if evals >= budget:
                simplex[-1], values[-1] = xr, fr
                break
            xe = centroid + 2.0 * (centroid - worst)
            fe = call(xe)
            simplex[-1], values[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
        else:
            if evals >= budget:
                if fr < values[-1]:
                    simplex[-1], values[-1] = xr, fr
                break
            if fr < values[-1]:
                xc = centroid + 0.5 * (xr - centroid)
            else:
                xc = centroid + 0.5 * (worst - centroid)
            fc = call(xc)
            if fc < min(fr, values[-1]):
                simplex[-1], values[-1] = xc, fc
            else:
                if fr < values[-1]:
                    simplex[-1], values[-1] = xr, fr
                for i in range(1, len(simplex)):
                    if evals >= budget:
                        break
                    simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0])
                    values[i] = call(simplex[i])
    return simplex, values
