"""Batch driver: read a manifest, run checks, write one report per line.

Usage::

    warpiso run --manifest m.yaml --out reports.jsonl [--format jsonl|csv]
    warpiso table --kind Psi --manifest m.yaml --out psi.csv

Exit codes: 0 when every report passes, 1 when a check with valid
hypotheses fails, 2 on configuration errors or when any report has status
``hypothesis-violated`` or ``error``.  The thread count for sweeps comes
from ``WARPISO_THREADS``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import math
import sys
from typing import Any, Literal, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .core import Density, WarpedManifold
from .errors import WarpisoError
from .profiles import KINDS, profile_function
from .quadrature import McOracle, QuadratureRule
from .report import DEFAULT_EQUALITY_TOL, ERROR, HYPOTHESIS_VIOLATED, OK, DeficitReport, error_report
from .surface import CenteredBall, OffCenterBall, Perturbed, Slice, make_profile
from .verify import CASES, check_monte_carlo, evaluate_case, minimize_deficit, sweep

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

CSV_HEADER = ("case", "lhs", "rhs", "deficit", "rel_deficit", "status", "pass")
TABLE_HEADER = ("t", "F", "G")
MONTE_CARLO = "MonteCarlo"
CHECK_IDS = CASES + (MONTE_CARLO,)


# --- manifest schema ---------------------------------------------------------------

class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ManifoldSpec(_Strict):
    kind: Literal["hyperbolic", "euclidean", "ads-schwarzschild"]
    n: int = Field(ge=1)
    m: float | None = None
    r_max: float = Field(default=3.0, gt=0)

    @model_validator(mode="after")
    def _mass(self):
        if self.kind == "ads-schwarzschild" and (self.m is None or not self.m > 0):
            raise ValueError("ads-schwarzschild needs a positive mass m")
        if self.kind != "ads-schwarzschild" and self.m not in (None, 0):
            raise ValueError(f"mass m is only meaningful for ads-schwarzschild, not {self.kind}")
        return self

    def build(self) -> WarpedManifold:
        if self.kind == "hyperbolic":
            return WarpedManifold.hyperbolic(self.n, self.r_max)
        if self.kind == "euclidean":
            return WarpedManifold.euclidean(self.n, self.r_max)
        return WarpedManifold.ads_schwarzschild(self.n, self.m, self.r_max)


_DENSITY_PARAM = {"constant": "value", "exp-quadratic": "c", "cosh-linear": "c", "power-quadratic": "p"}


class DensitySpec(_Strict):
    kind: Literal["constant", "exp-quadratic", "cosh-linear", "power-quadratic", "product"] = "constant"
    params: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _params(self):
        self.build()
        return self

    def build(self) -> Density:
        params = dict(self.params)
        T = float(params.pop("T", math.inf))
        if self.kind == "product":
            factors = params.pop("factors", None)
            if not isinstance(factors, list) or not factors:
                raise ValueError("product density needs a non-empty 'factors' list")
            if params:
                raise ValueError(f"unknown density params {sorted(params)}")
            return Density("product", 1.0, tuple(DensitySpec(**f).build() for f in factors), T)
        key = _DENSITY_PARAM[self.kind]
        default = 1.0 if self.kind == "constant" else None
        value = params.pop(key, default)
        if value is None:
            raise ValueError(f"{self.kind} density needs param '{key}'")
        if params:
            raise ValueError(f"unknown density params {sorted(params)}; {self.kind} takes '{key}' and 'T'")
        try:
            return Density(self.kind, float(value), (), T)
        except WarpisoError as exc:
            raise ValueError(str(exc)) from None


_GENERATOR_PARAMS = {
    "ball": {"r0", "rho0"},
    "slice": {"r0", "rho0"},
    "perturbed": {"r0", "rho0", "coeffs"},
    "off-center": {"radius", "d"},
}


def build_generator(kind: str, params: dict):
    """Generator from manifest params; ``perturbed`` also accepts ``eps<k>`` keys."""
    params = dict(params)
    if kind == "perturbed":
        eps = {k: float(params.pop(k)) for k in list(params) if k.startswith("eps")}
        extra = set(params) - _GENERATOR_PARAMS[kind]
        if extra:
            raise ValueError(f"unknown perturbed params {sorted(extra)}")
        coeffs = params.pop("coeffs", None)
        if coeffs is not None and eps:
            raise ValueError("give either 'coeffs' or 'eps<k>' keys, not both")
        if coeffs is not None:
            return Perturbed(r0=params.get("r0"), rho0=params.get("rho0"),
                             coeffs=tuple(float(c) for c in coeffs))
        return Perturbed.modes(params.get("r0"), params.get("rho0"), **eps)
    extra = set(params) - _GENERATOR_PARAMS[kind]
    if extra:
        raise ValueError(f"unknown {kind} params {sorted(extra)}; expected {sorted(_GENERATOR_PARAMS[kind])}")
    if kind == "off-center":
        if "radius" not in params:
            raise ValueError("off-center needs param 'radius'")
        return OffCenterBall(float(params["radius"]), float(params.get("d", 0.0)))
    cls = CenteredBall if kind == "ball" else Slice
    return cls(r0=params.get("r0"), rho0=params.get("rho0"))


class SurfaceSpec(_Strict):
    generator: Literal["ball", "slice", "perturbed", "off-center"]
    params: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _params(self):
        try:
            build_generator(self.generator, self.params)
        except (KeyError, TypeError, WarpisoError) as exc:
            raise ValueError(f"invalid {self.generator} params: {exc}") from None
        return self


class QuadratureSpec(_Strict):
    order: int = Field(default=48, ge=1)
    panels: int = Field(default=4, ge=1)
    mc_samples: int = Field(default=1_000_000, ge=1)
    seed: int = Field(default=42, ge=0, lt=2**64)

    def rule(self) -> QuadratureRule:
        return QuadratureRule(self.order, self.panels)

    def oracle(self) -> McOracle:
        return McOracle(self.mc_samples, self.seed)


class ToleranceSpec(_Strict):
    equality: float = Field(default=DEFAULT_EQUALITY_TOL, gt=0)
    inequality: float = Field(default=DEFAULT_EQUALITY_TOL, ge=0)


class MinimizeSpec(_Strict):
    modes: list[int] = Field(default_factory=lambda: [2])
    start: list[float] = Field(default_factory=lambda: [1.0, 0.1])
    budget: int = Field(default=200, ge=1)
    use_rho: bool = False


class CheckSpec(_Strict):
    case: str
    sweep: dict[str, list[Any]] | None = None
    minimize: MinimizeSpec | None = None
    estimate_error: bool = False

    @field_validator("case")
    @classmethod
    def _known(cls, v):
        if v not in CHECK_IDS:
            raise ValueError(f"unknown check {v!r}; expected one of {list(CHECK_IDS)}")
        return v

    @model_validator(mode="after")
    def _options(self):
        if self.sweep is not None and self.minimize is not None:
            raise ValueError("a check takes either 'sweep' or 'minimize', not both")
        if self.case == MONTE_CARLO and (self.sweep or self.minimize or self.estimate_error):
            raise ValueError("MonteCarlo takes no options")
        return self


class Manifest(_Strict):
    manifold: ManifoldSpec
    density: DensitySpec = Field(default_factory=DensitySpec)
    surface: SurfaceSpec
    quadrature: QuadratureSpec = Field(default_factory=QuadratureSpec)
    checks: list[Union[str, CheckSpec]] = Field(default_factory=list)
    tolerances: ToleranceSpec = Field(default_factory=ToleranceSpec)

    @field_validator("checks")
    @classmethod
    def _normalise(cls, v):
        return [CheckSpec(case=c) if isinstance(c, str) else c for c in v]


class ManifestError(Exception):
    """Manifest that cannot be read or does not match the schema."""


# --- loading with line numbers -----------------------------------------------------

def _node_at(node, loc):
    """Deepest YAML node along the pydantic error location."""
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            nxt = next((v for k, v in node.value if k.value == key), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            nxt = node.value[key]
        else:
            nxt = None
        if nxt is None:
            break
        node = nxt
    return node


def load_manifest(path: str) -> tuple[Manifest, str]:
    """Parse and validate a YAML or JSON manifest; returns it with its sha256."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ManifestError(f"{path}: cannot read manifest: {exc.strerror}") from None
    digest = hashlib.sha256(raw).hexdigest()
    text = raw.decode("utf-8", errors="replace")
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}" if mark else path
        raise ManifestError(f"{where}: invalid YAML: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(data, dict):
        raise ManifestError(f"{path}:1: manifest must be a mapping")
    try:
        return Manifest.model_validate(data), digest
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            node = _node_at(root, err["loc"])
            field = ".".join(str(x) for x in err["loc"]) or "<root>"
            lines.append(f"{path}:{node.start_mark.line + 1}: {field}: {err['msg']}")
        raise ManifestError("\n".join(lines)) from None


# --- running checks ----------------------------------------------------------------

def _sweep_grid(base: dict, generator: str, axes: dict[str, list]) -> list:
    keys = list(axes)
    grid = []
    for values in itertools.product(*(axes[k] for k in keys)):
        grid.append(build_generator(generator, {**base, **dict(zip(keys, values))}))
    return grid


def run_check(check: CheckSpec, man: Manifest, M: WarpedManifold, d: Density) -> list[DeficitReport]:
    rule = man.quadrature.rule()
    tol = man.tolerances.equality
    tol_ineq = man.tolerances.inequality
    surf = man.surface
    try:
        if check.minimize is not None:
            opt = check.minimize
            res = minimize_deficit(check.case, M, d, opt.modes, opt.start, opt.budget, rule, opt.use_rho)
            x = res.best
            coeffs = [0.0] * max(opt.modes, default=0)
            for k, eps in zip(opt.modes, x[1:]):
                coeffs[k - 1] = eps
            key = "rho0" if opt.use_rho else "r0"
            gen = Perturbed(**{key: x[0]}, coeffs=tuple(coeffs))
            rep = evaluate_case(check.case, make_profile(gen, M), M, d, rule, tol=tol, tol_ineq=tol_ineq)
            return [rep.with_details(search={"best": list(x), "best_deficit": res.best_deficit,
                                             "evaluations": res.evaluations, "start": opt.start,
                                             "budget": opt.budget, "modes": opt.modes})]
        if check.sweep is not None:
            grid = _sweep_grid(surf.params, surf.generator, check.sweep)
            return sweep(check.case, grid, M, d, rule, tol=tol, tol_ineq=tol_ineq,
                         estimate_error=check.estimate_error)
        p = make_profile(build_generator(surf.generator, surf.params), M)
        if check.case == MONTE_CARLO:
            return check_monte_carlo(p, M, d, man.quadrature.oracle(), rule)
        return [evaluate_case(check.case, p, M, d, rule, tol=tol, tol_ineq=tol_ineq,
                              estimate_error=check.estimate_error)]
    except (WarpisoError, ValueError, TypeError) as exc:
        return [error_report(check.case, str(exc))]


def run_manifest(man: Manifest) -> list[DeficitReport]:
    try:
        M = man.manifold.build()
        d = man.density.build()
    except WarpisoError as exc:
        return [error_report("manifest", str(exc))]
    reports = []
    for check in man.checks:
        reports.extend(run_check(check, man, M, d))
    return reports


def exit_code(reports: list[DeficitReport]) -> int:
    if any(r.status == OK and not r.passed for r in reports):
        return EXIT_FAIL
    if any(r.status in (HYPOTHESIS_VIOLATED, ERROR) for r in reports):
        return EXIT_CONFIG
    return EXIT_OK


# --- output ------------------------------------------------------------------------

def fmt_float(x: float) -> str:
    return format(x, ".17g")


def to_json(obj) -> str:
    """Compact JSON with 17 significant digits; non-finite floats become null."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return _json_string(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{_json_string(str(k))}:{to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(to_json(v) for v in obj) + "]"
    if hasattr(obj, "item"):
        return to_json(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _json_string(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def write_jsonl(reports, out, digest: str) -> None:
    for r in reports:
        out.write(to_json({**r.as_dict(), "manifest_sha256": digest}) + "\n")


def _csv_value(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return fmt_float(x)
    return str(x)


def write_csv(reports, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in reports:
        w.writerow([_csv_value(v) for v in (r.case, r.lhs, r.rhs, r.deficit, r.rel_deficit,
                                            r.status, r.passed)])


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# --- commands ----------------------------------------------------------------------

def cmd_run(args) -> int:
    man, digest = load_manifest(args.manifest)
    reports = run_manifest(man)
    buf = io.StringIO()
    if args.format == "csv":
        write_csv(reports, buf)
    else:
        write_jsonl(reports, buf, digest)
    _write(args.out, buf.getvalue())
    return exit_code(reports)


def cmd_table(args) -> int:
    man, _ = load_manifest(args.manifest)
    try:
        pf = profile_function(args.kind, man.manifold.build(), man.density.build(), man.quadrature.rule())
    except WarpisoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_HEADER)
    for row in zip(pf.t, pf.F_table, pf.G_table):
        w.writerow([fmt_float(float(v)) for v in row])
    _write(args.out, buf.getvalue())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="warpiso", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the checks listed in a manifest")
    run.add_argument("--manifest", required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    run.set_defaults(func=cmd_run)
    table = sub.add_parser("table", help="tabulate a profile function as t,F,G")
    table.add_argument("--kind", required=True, choices=KINDS)
    table.add_argument("--manifest", required=True)
    table.add_argument("--out", required=True)
    table.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
