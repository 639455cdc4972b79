"""Command-line front end: ingestion, grid generation, pipeline, JSON reports.

Input is a CSV with header columns x1..xd and a final column f, or a
generated hyperbox grid (``--grid "bounds;resolution;type;expression"``).
Each command writes one JSON report and exits 0 when the verdict is
pass/optimal, 2 when it is fail/non-optimal, and 1 on errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import re
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .alternation import HyperplaneSplit, HyperplaneVerdict, verify_by_hyperplanes
from .fitting import (
    DEFAULT_REL_TOL,
    ExtremeSets,
    FitResult,
    SampleSet,
    compute_psi,
    extreme_sets,
    fit_minimax,
)
from .monomials import Number, PolynomialModel, build_basis, evaluate
from .optimality import (
    IntersectionCertificate,
    SeparationWitness,
    check_hull_intersection,
    check_isolability,
    verify_certificate,
)
from .reduction import ReductionReport, SingleStrategy, reduce_and_verify


# --- arithmetic expressions for grid targets --------------------------------


class ExpressionError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.position = position


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(text) - len(stripped)
            raise ExpressionError(f"unexpected character {text[bad_at]!r}", bad_at)
        if m.group("num") is not None:
            tokens.append(("num", m.group(0).strip(), m.start("num")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class Expression:
    """Parsed arithmetic over x1..xd with +, -, *, /, ^, abs, min, max."""

    def __init__(self, text: str):
        self.text = text
        self._tokens = _tokenize(text)
        self._pos = 0
        self.ast = self._parse_sum()
        kind, val, at = self._tokens[self._pos]
        if kind != "end":
            raise ExpressionError(f"unexpected token {val!r}", at)
        self.max_var = _max_var(self.ast)

    # grammar: sum -> term (('+'|'-') term)* ; term -> factor (('*'|'/') factor)*
    # factor -> '-' factor | power ; power -> atom ('^' factor)?   (right assoc)
    def _peek(self):
        return self._tokens[self._pos]

    def _take(self):
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def _parse_sum(self):
        node = self._parse_term()
        while True:
            kind, val, _ = self._peek()
            if kind == "op" and val in "+-":
                self._take()
                node = ("bin", val, node, self._parse_term())
            else:
                return node

    def _parse_term(self):
        node = self._parse_factor()
        while True:
            kind, val, _ = self._peek()
            if kind == "op" and val in "*/":
                self._take()
                node = ("bin", val, node, self._parse_factor())
            else:
                return node

    def _parse_factor(self):
        kind, val, at = self._peek()
        if kind == "op" and val == "-":
            self._take()
            return ("neg", self._parse_factor())
        return self._parse_power()

    def _parse_power(self):
        node = self._parse_atom()
        kind, val, _ = self._peek()
        if kind == "op" and val == "^":
            self._take()
            return ("bin", "^", node, self._parse_factor())
        return node

    def _parse_atom(self):
        kind, val, at = self._take()
        if kind == "num":
            return ("num", val)
        if kind == "name":
            if re.fullmatch(r"x\d+", val):
                k = int(val[1:])
                if k < 1:
                    raise ExpressionError(f"coordinate {val!r} is not valid", at)
                return ("var", k - 1)
            if val in ("abs", "min", "max"):
                kind2, val2, at2 = self._take()
                if not (kind2 == "op" and val2 == "("):
                    raise ExpressionError(f"{val} needs parenthesised arguments", at2)
                args = [self._parse_sum()]
                while True:
                    kind3, val3, at3 = self._take()
                    if kind3 == "op" and val3 == ",":
                        args.append(self._parse_sum())
                    elif kind3 == "op" and val3 == ")":
                        break
                    else:
                        raise ExpressionError("expected ',' or ')'", at3)
                if val == "abs" and len(args) != 1:
                    raise ExpressionError("abs takes exactly one argument", at)
                if val in ("min", "max") and len(args) < 2:
                    raise ExpressionError(f"{val} takes at least two arguments", at)
                return ("call", val, tuple(args))
            raise ExpressionError(f"unknown name {val!r}", at)
        if kind == "op" and val == "(":
            node = self._parse_sum()
            kind2, val2, at2 = self._take()
            if not (kind2 == "op" and val2 == ")"):
                raise ExpressionError("expected ')'", at2)
            return node
        raise ExpressionError(f"unexpected token {val!r}" if val else "unexpected end of expression", at)

    def __call__(self, point: Sequence[Number], exact: bool = False) -> Number:
        if self.max_var >= len(point):
            raise ValueError(
                f"expression uses x{self.max_var + 1} but points have dimension {len(point)}"
            )
        return _eval(self.ast, point, exact)


def _max_var(node) -> int:
    kind = node[0]
    if kind == "num":
        return -1
    if kind == "var":
        return node[1]
    if kind == "neg":
        return _max_var(node[1])
    if kind == "bin":
        return max(_max_var(node[2]), _max_var(node[3]))
    return max(_max_var(arg) for arg in node[2])


def _eval(node, point, exact: bool) -> Number:
    kind = node[0]
    if kind == "num":
        return Fraction(node[1]) if exact else float(node[1])
    if kind == "var":
        return point[node[1]]
    if kind == "neg":
        return -_eval(node[1], point, exact)
    if kind == "call":
        args = [_eval(a, point, exact) for a in node[2]]
        return {"abs": lambda: abs(args[0]), "min": lambda: min(args), "max": lambda: max(args)}[
            node[1]
        ]()
    _, op, lnode, rnode = node
    left = _eval(lnode, point, exact)
    right = _eval(rnode, point, exact)
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        return left / right
    if isinstance(right, Fraction):
        if right.denominator != 1:
            raise ValueError("non-integer exponents are not supported in exact mode")
        right = int(right)
    if isinstance(right, float) and right.is_integer():
        right = int(right)
    return left**right


# --- ingestion and grids -----------------------------------------------------


def _parse_number(cell: str, exact: bool) -> Number:
    cell = cell.strip()
    if exact:
        try:
            return Fraction(cell)
        except (ValueError, ZeroDivisionError):
            return Fraction(float(cell))
    return float(cell)


def ingest(path: str, exact: bool = False) -> SampleSet:
    """Read a CSV with header x1..xd,f into a validated sample set."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if len(header) < 2 or header[-1] != "f":
            raise ValueError(f"{path}: header must be x1..xd followed by f, got {header}")
        d = len(header) - 1
        expected = [f"x{i + 1}" for i in range(d)]
        if header[:-1] != expected:
            raise ValueError(f"{path}: coordinate columns must be named {expected}, got {header[:-1]}")
        points, values = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != d + 1:
                raise ValueError(f"{path}:{lineno}: expected {d + 1} columns, got {len(row)}")
            try:
                coords = tuple(_parse_number(c, exact) for c in row[:-1])
                value = _parse_number(row[-1], exact)
            except ValueError as err:
                raise ValueError(f"{path}:{lineno}: {err}") from None
            points.append(coords)
            values.append(value)
    try:
        return SampleSet(points, values)
    except ValueError as err:
        raise ValueError(f"{path}: {err}") from None


def generate_grid(
    bounds: Sequence[tuple[Number, Number]],
    resolution,
    node_type: str,
    expression,
    exact: bool = False,
) -> SampleSet:
    """Cartesian-product grid over a hyperbox with f evaluated per point.

    Uniform nodes are exact rationals (kept when `exact`); Chebyshev nodes
    are the cosine points mapped onto each axis.
    """
    if node_type not in ("uniform", "chebyshev"):
        raise ValueError(f"node type must be uniform or chebyshev, got {node_type!r}")
    if isinstance(resolution, int):
        resolution = [resolution] * len(bounds)
    resolution = list(resolution)
    if len(resolution) != len(bounds):
        raise ValueError(f"{len(resolution)} resolutions for {len(bounds)} axes")
    if isinstance(expression, str):
        expression = Expression(expression)
    if expression.max_var >= len(bounds):
        raise ValueError(
            f"expression uses x{expression.max_var + 1} but the grid has {len(bounds)} axes"
        )

    axes = []
    for (lo, hi), res in zip(bounds, resolution):
        if not float(lo) < float(hi):
            raise ValueError(f"bounds must satisfy lo < hi, got ({lo}, {hi})")
        if res < 2:
            raise ValueError(f"resolution must be at least 2, got {res}")
        if node_type == "uniform":
            lo_f, hi_f = Fraction(lo), Fraction(hi)
            nodes = [lo_f + Fraction(k, res - 1) * (hi_f - lo_f) for k in range(res)]
            if not exact:
                nodes = [float(x) for x in nodes]
        else:
            mid = (float(lo) + float(hi)) / 2
            half = (float(hi) - float(lo)) / 2
            nodes = sorted(mid + half * math.cos(math.pi * k / (res - 1)) for k in range(res))
            if exact:
                nodes = [Fraction(x) for x in nodes]
        axes.append(nodes)

    points = [tuple(p) for p in product(*axes)]
    values = [expression(p, exact=exact) for p in points]
    return SampleSet(points, values)


def parse_grid_spec(spec: str, exact: bool = False) -> SampleSet:
    """Parse "lo,hi[:lo,hi...];res[:res...];uniform|chebyshev;expression"."""
    parts = spec.split(";", 3)
    if len(parts) != 4:
        raise ValueError("grid spec needs four ';'-separated fields: bounds;resolution;type;expression")
    bounds_text, res_text, node_type = (p.strip() for p in parts[:3])
    expr_text = parts[3].strip()
    bounds = []
    for axis in bounds_text.split(":"):
        pieces = axis.split(",")
        if len(pieces) != 2:
            raise ValueError(f"axis bounds must look like 'lo,hi', got {axis!r}")
        bounds.append((Fraction(pieces[0].strip()), Fraction(pieces[1].strip())))
    res_pieces = res_text.split(":")
    if len(res_pieces) == 1:
        resolution = [int(res_pieces[0])] * len(bounds)
    else:
        resolution = [int(r) for r in res_pieces]
    return generate_grid(bounds, resolution, node_type, expr_text, exact=exact)


# --- configuration and reports ----------------------------------------------


@dataclass
class RunConfig:
    command: str  # fit | verify | reduce | alternate | report
    input_path: Optional[str] = None
    grid: Optional[str] = None
    degree: Optional[int] = None
    rel_tol: float = DEFAULT_REL_TOL
    strategy: str = "exhaustive"  # single | exhaustive
    exact: bool = False
    out: Optional[str] = None
    coeffs: Optional[str] = None
    report_path: Optional[str] = None

    def __post_init__(self):
        if self.degree is not None and self.degree < 0:
            raise ValueError("degree must be non-negative")
        if not (0 <= self.rel_tol < 0.5):
            raise ValueError("rel-tol must lie in [0, 0.5)")
        if self.strategy not in ("single", "exhaustive"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


def _jnum(x: Number):
    if isinstance(x, Fraction):
        return str(x)
    return x


def _jnum_parse(v) -> Number:
    return Fraction(v) if isinstance(v, str) else v


def _model_to_json(model: PolynomialModel) -> dict:
    return {"degree": model.degree, "coefficients": [_jnum(c) for c in model.coefficients]}


def _outcome_to_json(outcome) -> dict:
    if isinstance(outcome, IntersectionCertificate):
        return {
            "certificate": {
                "degree": outcome.degree,
                "plus": list(outcome.plus_indices),
                "minus": list(outcome.minus_indices),
                "alpha": [_jnum(w) for w in outcome.alpha],
                "beta": [_jnum(w) for w in outcome.beta],
                "moment_residual": _jnum(outcome.moment_residual),
            }
        }
    return {
        "witness": {
            "coefficients": [_jnum(c) for c in outcome.model.coefficients],
            "degree": outcome.model.degree,
            "margins": {
                "plus": _jnum(outcome.plus_margin) if outcome.plus_margin is not None else None,
                "minus": _jnum(outcome.minus_margin) if outcome.minus_margin is not None else None,
            },
        }
    }


def _reduction_to_json(report: ReductionReport) -> dict:
    return {
        "verdict": report.verdict,
        "vacuous_branches": report.vacuous_branches,
        "traces": [
            {
                "branch": [[dim, variant] for dim, variant in trace.branch],
                "verdict": trace.verdict,
                "steps": [
                    {
                        "dimension": step.dimension,
                        "variant": step.variant,
                        "delta": _jnum(step.delta),
                        "removed": list(step.removed),
                        "degree_after": step.degree_after,
                    }
                    for step in trace.steps
                ],
            }
            for trace in report.traces
        ],
    }


def _split_to_json(sp: Optional[HyperplaneSplit]) -> Optional[dict]:
    if sp is None:
        return None
    return {
        "normal": [_jnum(c) for c in sp.normal],
        "offset": _jnum(sp.offset),
        "plus_side": list(sp.plus_side),
        "minus_side": list(sp.minus_side),
        "on_plane_plus": list(sp.on_plane_plus),
        "on_plane_minus": list(sp.on_plane_minus),
    }


def _alternation_to_json(verdict: HyperplaneVerdict) -> dict:
    out = {
        "verdict": verdict.verdict,
        "planes_checked": verdict.planes_checked,
        "counterexample": _split_to_json(verdict.counterexample),
    }
    if verdict.warning:
        out["warning"] = verdict.warning
    return out


def _load_samples(config: RunConfig) -> tuple[SampleSet, str]:
    if config.input_path and config.grid:
        raise ValueError("give either --input or --grid, not both")
    if config.grid:
        return parse_grid_spec(config.grid, exact=config.exact), f"grid:{config.grid}"
    if config.input_path:
        return ingest(config.input_path, exact=config.exact), config.input_path
    raise ValueError("an input is required (--input or --grid)")


def _load_model(config: RunConfig, samples: SampleSet) -> PolynomialModel:
    with open(config.coeffs) as handle:
        payload = json.load(handle)
    degree = payload["degree"]
    if config.degree is not None and config.degree != degree:
        raise ValueError(f"--degree {config.degree} conflicts with coefficients file degree {degree}")
    coeffs = [_jnum_parse(c) for c in payload["coefficients"]]
    if config.exact:
        coeffs = [Fraction(c) for c in coeffs]
    basis = build_basis(samples.dimension, degree)
    return PolynomialModel(basis, tuple(coeffs))


def run(config: RunConfig) -> tuple[int, dict]:
    """Execute one command; returns (exit code, report dict)."""
    if config.command == "report":
        return _run_revalidate(config)

    samples, source = _load_samples(config)
    timings: dict[str, float] = {}
    report: dict = {
        "instance": {"source": source, "dimension": samples.dimension, "points": len(samples)},
        "arithmetic": "exact" if config.exact else "float",
        "timings": timings,
    }

    if config.coeffs:
        model = _load_model(config, samples)
        degree = model.degree
        fit = None
    else:
        if config.degree is None:
            raise ValueError("--degree is required when fitting")
        degree = config.degree
        t0 = time.perf_counter()
        fit = fit_minimax(samples, degree, exact=config.exact)
        timings["fit_s"] = time.perf_counter() - t0
        model = fit.model
    report["degree"] = degree
    report["model"] = _model_to_json(model)

    extremes = extreme_sets(model, samples, rel_tol=config.rel_tol)
    report["psi"] = _jnum(extremes.psi)
    report["extremes"] = {
        "plus": list(extremes.plus),
        "minus": list(extremes.minus),
        "degenerate": extremes.degenerate,
    }

    code = 0
    if config.command in ("fit", "verify"):
        t0 = time.perf_counter()
        outcome = check_hull_intersection(extremes, samples, degree, exact=config.exact)
        timings["certificate_s"] = time.perf_counter() - t0
        report.update(_outcome_to_json(outcome))
        optimal = isinstance(outcome, IntersectionCertificate)
        code = 0 if optimal else 2
        if config.command == "verify":
            iso = check_isolability(extremes, samples, degree, exact=config.exact)
            report["isolability"] = {"isolable": iso.isolable, "margin": _jnum(iso.margin)}
    if config.command == "fit" and degree >= 1 and not extremes.degenerate:
        if extremes.plus and extremes.minus:
            strategy = "exhaustive" if config.strategy == "exhaustive" else SingleStrategy()
            t0 = time.perf_counter()
            red = reduce_and_verify(extremes, samples, degree, strategy=strategy, exact=config.exact)
            timings["reduction_s"] = time.perf_counter() - t0
            report["reduction"] = _reduction_to_json(red)
            t0 = time.perf_counter()
            alt = verify_by_hyperplanes(extremes, samples, degree, exact=config.exact)
            timings["alternation_s"] = time.perf_counter() - t0
            report["alternation"] = _alternation_to_json(alt)
    if config.command == "reduce":
        if degree < 1:
            raise ValueError("reduce needs degree >= 1")
        if extremes.degenerate:
            report["reduction"] = {"verdict": "pass", "vacuous_branches": 0, "traces": [],
                                   "note": "exact fit; nothing to reduce"}
        else:
            strategy = "exhaustive" if config.strategy == "exhaustive" else SingleStrategy()
            t0 = time.perf_counter()
            red = reduce_and_verify(extremes, samples, degree, strategy=strategy, exact=config.exact)
            timings["reduction_s"] = time.perf_counter() - t0
            report["reduction"] = _reduction_to_json(red)
            code = 0 if red.verdict == "pass" else 2
    if config.command == "alternate":
        if degree < 1:
            raise ValueError("alternate needs degree >= 1")
        if extremes.degenerate:
            report["alternation"] = {"verdict": "pass", "planes_checked": 0, "counterexample": None,
                                     "note": "exact fit; trivially optimal"}
        else:
            t0 = time.perf_counter()
            alt = verify_by_hyperplanes(extremes, samples, degree, exact=config.exact)
            timings["alternation_s"] = time.perf_counter() - t0
            report["alternation"] = _alternation_to_json(alt)
            code = 0 if alt.verdict in ("pass", "vacuous") else 2
    return code, report


def _run_revalidate(config: RunConfig) -> tuple[int, dict]:
    """Re-validate a previously written report against its input data."""
    if not config.report_path:
        raise ValueError("report re-validation needs --report <json>")
    with open(config.report_path) as handle:
        report = json.load(handle)
    exact = report.get("arithmetic") == "exact"
    config.exact = exact  # ingest in the report's own arithmetic
    samples, _ = _load_samples(config)
    checks: dict[str, bool] = {}

    if report["instance"]["points"] != len(samples) or report["instance"]["dimension"] != samples.dimension:
        raise ValueError("input data does not match the report instance")

    degree = report["degree"]
    if "model" in report:
        coeffs = [_jnum_parse(c) for c in report["model"]["coefficients"]]
        basis = build_basis(samples.dimension, degree)
        model = PolynomialModel(basis, tuple(coeffs))
        psi = compute_psi(model, samples)
        claimed = _jnum_parse(report["psi"])
        if exact:
            checks["psi"] = psi == claimed
        else:
            checks["psi"] = abs(float(psi) - float(claimed)) <= 1e-9 * max(1.0, float(claimed))

    if "certificate" in report:
        cert = report["certificate"]
        plus = cert["plus"]
        minus = cert["minus"]
        alpha = [_jnum_parse(w) for w in cert["alpha"]]
        beta = [_jnum_parse(w) for w in cert["beta"]]
        rebuilt = IntersectionCertificate(
            degree, tuple(plus), tuple(minus), tuple(alpha), tuple(beta), 0, exact
        )
        residual = verify_certificate(rebuilt, samples)
        tol = 0 if exact else 1e-8
        checks["certificate_moments"] = abs(residual) <= tol
        checks["certificate_sums"] = (
            abs(sum(alpha) - 1) <= (0 if exact else 1e-9)
            and abs(sum(beta) - 1) <= (0 if exact else 1e-9)
        )
    if "witness" in report:
        wit = report["witness"]
        coeffs = [_jnum_parse(c) for c in wit["coefficients"]]
        basis = build_basis(samples.dimension, wit["degree"])
        model = PolynomialModel(basis, tuple(coeffs))
        plus = report["extremes"]["plus"]
        minus = report["extremes"]["minus"]
        ok = all(evaluate(model, samples.points[i]) > 0 for i in plus)
        ok = ok and all(evaluate(model, samples.points[i]) < 0 for i in minus)
        checks["witness_separates"] = ok

    valid = all(checks.values())
    return (0 if valid else 2), {"revalidated": config.report_path, "checks": checks, "valid": valid}


# --- argument parsing ---------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minimaxfit",
        description="Best uniform polynomial approximation with optimality verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("fit", "fit a model and run the full verification pipeline"),
        ("verify", "certificate / separating-witness check (optionally for given coefficients)"),
        ("reduce", "point-reduction necessary-condition check"),
        ("alternate", "hyperplane split verification"),
        ("report", "re-validate a previously written report"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", help="CSV file with header x1..xd,f")
        p.add_argument("--grid", help='grid spec "lo,hi[:lo,hi];res[:res];uniform|chebyshev;expr"')
        p.add_argument("--degree", type=int, help="model degree m")
        p.add_argument("--rel-tol", type=float, default=DEFAULT_REL_TOL,
                       help="relative band for extreme-point detection")
        p.add_argument("--strategy", choices=["single", "exhaustive"], default="exhaustive",
                       help="reduction branch strategy")
        p.add_argument("--exact", action="store_true", help="exact rational arithmetic")
        p.add_argument("--out", help="write the JSON report here (default: stdout)")
        if name in ("verify", "reduce", "alternate"):
            p.add_argument("--coeffs", help="JSON file {degree, coefficients} to verify as-is")
        if name == "report":
            p.add_argument("--report", dest="report_path", help="report JSON to re-validate")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    try:
        config = RunConfig(
            command=ns.command,
            input_path=ns.input,
            grid=ns.grid,
            degree=ns.degree,
            rel_tol=ns.rel_tol,
            strategy=ns.strategy,
            exact=ns.exact,
            out=ns.out,
            coeffs=getattr(ns, "coeffs", None),
            report_path=getattr(ns, "report_path", None),
        )
        code, report = run(config)
    except (OSError, ValueError, KeyError, ZeroDivisionError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    text = json.dumps(report, indent=2)
    if config.out:
        with open(config.out, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return code


def console_main() -> None:
    sys.exit(main())
