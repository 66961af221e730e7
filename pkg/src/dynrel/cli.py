"""Command line front end.

Exit codes: 0 success, 1 other error, 2 model diagnostics with errors (or
bad usage), 3 unsupported structure / no equivalence, 4 quadrature did not
converge.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path

from .algebra import DOr, flatten
from .analytic import analyze_dft, analyze_drbd
from .conversion import convert_model
from .dsl import Diagnostic, ModelSyntaxError, format_model, parse_model, validate
from .errors import DynrelError, NoEquivalenceError, QuadratureError, UnsupportedStructureError
from .model import Model
from .montecarlo import estimate_both
from .quadrature import DEFAULT_TOL
from .report import emit_report, to_record

EXIT_OK, EXIT_ERROR, EXIT_DIAGNOSTICS, EXIT_UNSUPPORTED, EXIT_NUMERIC = 0, 1, 2, 3, 4
TOL_ENV = "DYNREL_TOL"
MC_AGREEMENT_SIGMAS = 3.5


class _Failed(Exception):
    def __init__(self, code: int):
        self.code = code


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(path: str) -> Model:
    try:
        text = Path(path).read_bytes()
    except OSError as exc:
        _err(f"{path}: {exc.strerror}")
        raise _Failed(EXIT_ERROR) from None
    try:
        model = parse_model(text)
    except ModelSyntaxError as exc:
        _report_diagnostics(path, exc.diagnostics)
        raise _Failed(EXIT_DIAGNOSTICS) from None
    diags = validate(model)
    _report_diagnostics(path, [d for d in diags if d.severity == "warning"])
    errors = [d for d in diags if d.severity == "error"]
    if errors:
        _report_diagnostics(path, errors)
        raise _Failed(EXIT_DIAGNOSTICS)
    return model


def _report_diagnostics(path: str, diags: list[Diagnostic]) -> None:
    for d in diags:
        _err(f"{path}:{d}")


def _tolerance(flag: float | None) -> float:
    if flag is not None:
        return flag
    env = os.environ.get(TOL_ENV)
    if env:
        try:
            return float(env)
        except ValueError:
            _err(f"ignoring {TOL_ENV}={env!r}: not a number")
    return DEFAULT_TOL


def _times(t: float, grid: int | None) -> list[float]:
    if not grid or grid <= 1:
        return [t]
    return [t * k / grid for k in range(1, grid + 1)]


def _as(model: Model, kind: str) -> Model:
    return model if model.kind == kind else convert_model(model)


def _pie_terms(model: Model) -> int | None:
    try:
        return (1 << len(flatten(_as(model, "dft").top, DOr))) - 1
    except NoEquivalenceError:
        return None


def _analyze(model: Model, times: list[float], route: str, tol: float):
    # results carry the kind of the input model; the method names the route taken
    return [replace(r, kind=model.kind) for r in _route(model, times, route, tol)]


def _route(model: Model, times: list[float], route: str, tol: float):
    if route == "auto":
        try:
            results = _route(model, times, "drbd", tol)
        except (UnsupportedStructureError, NoEquivalenceError) as exc:
            _err(f"route auto: drbd route unavailable ({exc}); using dft route")
            return _route(model, times, "dft", tol)
        terms = _pie_terms(model)
        if terms is not None:
            _err(f"route auto: drbd route chosen, 1 structural pass instead of {terms} "
                 f"inclusion-exclusion term{'s' if terms != 1 else ''}")
        return results
    if route == "drbd":
        m = _as(model, "drbd")
        return [analyze_drbd(m, t, tol) for t in times]
    m = _as(model, "dft")
    return [analyze_dft(m, t, tol) for t in times]


def cmd_validate(args) -> int:
    model = _load(args.file)
    diags = validate(model)
    out = {"model": model.name, "kind": model.kind,
           "diagnostics": [d.__dict__ for d in diags]}
    sys.stdout.write(json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def cmd_analyze(args) -> int:
    model = _load(args.file)
    results = _analyze(model, _times(args.time, args.grid), args.route, _tolerance(args.tol))
    sys.stdout.write(emit_report(results, args.format).decode())
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = _load(args.file)
    results = []
    for t in _times(args.time, args.grid):
        results.extend(estimate_both(model, t, args.samples, args.seed, args.workers))
    sys.stdout.write(emit_report(results, args.format).decode())
    return EXIT_OK


def cmd_convert(args) -> int:
    model = _load(args.file)
    sys.stdout.write(format_model(convert_model(model)))
    return EXIT_OK


def cmd_compare(args) -> int:
    model = _load(args.file)
    tol = _tolerance(args.tol)
    results, checks = [], []
    for t in _times(args.time, args.grid):
        unrel = analyze_dft(_as(model, "dft"), t, tol)
        rel = analyze_drbd(_as(model, "drbd"), t, tol)
        mc_u, mc_r = estimate_both(model, t, args.samples, args.seed, args.workers)
        results += [unrel, rel, mc_u, mc_r]
        z = (mc_u.p_hat - unrel.value) / mc_u.std_err if mc_u.std_err > 0 else (
            0.0 if mc_u.p_hat == unrel.value else math.inf)
        checks.append({
            "time": t,
            "residual": abs(1.0 - (unrel.value + rel.value)),
            "pieTerms": unrel.term_count,
            "structuralPasses": rel.term_count,
            "mcZ": z,
            "mcAgrees": abs(z) <= MC_AGREEMENT_SIGMAS,
        })
    if args.format == "json":
        body = {"results": [to_record(r) for r in results], "checks": checks}
        sys.stdout.write(json.dumps(body, indent=2) + "\n")
    else:
        sys.stdout.write(emit_report(results, "csv").decode())
        for c in checks:
            _err(json.dumps(c))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dynrel", description="DFT/DRBD reliability analysis")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, time=True):
        sp.add_argument("file")
        if time:
            sp.add_argument("--time", type=float, required=True, help="mission time")
            sp.add_argument("--grid", type=int, help="evaluate at N evenly spaced times up to --time")
            sp.add_argument("--format", choices=["json", "csv"], default="json")

    def mc(sp):
        sp.add_argument("--samples", type=int, required=True)
        sp.add_argument("--seed", type=int, required=True)
        sp.add_argument("--workers", type=int, default=1)

    common(sub.add_parser("validate", help="check a model and list diagnostics"), time=False)
    a = sub.add_parser("analyze", help="analytic failure probability or reliability")
    common(a)
    a.add_argument("--tol", type=float)
    a.add_argument("--route", choices=["dft", "drbd", "auto"], default="auto")
    s = sub.add_parser("simulate", help="Monte Carlo estimates")
    common(s)
    mc(s)
    common(sub.add_parser("convert", help="print the equivalent model of the other kind"), time=False)
    c = sub.add_parser("compare", help="both analytic routes plus Monte Carlo, with residuals")
    common(c)
    mc(c)
    c.add_argument("--tol", type=float)
    return p


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"validate": cmd_validate, "analyze": cmd_analyze, "simulate": cmd_simulate,
               "convert": cmd_convert, "compare": cmd_compare}[args.command]
    try:
        return handler(args)
    except _Failed as exc:
        return exc.code
    except (UnsupportedStructureError, NoEquivalenceError) as exc:
        _err(f"unsupported structure: {exc}")
        return EXIT_UNSUPPORTED
    except QuadratureError as exc:
        _err(f"numeric error: {exc}")
        return EXIT_NUMERIC
    except DynrelError as exc:
        _err(f"error: {exc}")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
