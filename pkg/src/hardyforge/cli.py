"""Command-line front end.

    hardy-forge jd EXPR --dim 3
    hardy-forge weight --h "x^(2-d)" --V 1 --param d=3 --dim 3 --interval 0:inf
    hardy-forge feller --h "x*(1-x)" --interval 0:1
    hardy-forge classify --h ... --V ... [--expect optimal]
    hardy-forge spectrum --h ... --V ... --truncation 0.01:100:500 ...
    hardy-forge bessel --h ... --V ... --interval 0.01:10
    hardy-forge catalog list | catalog run NAME | catalog run --all

Exit status: 0 success or PASS, 1 FAIL (inequality violated, expectation
missed), 2 indeterminate, 64 usage error.  ``--json`` prints a
deterministic envelope; wall time goes to standard error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .besselpair import OdeProblem, ground_state, ode_residual, shoot
from .calculus import j_op
from .catalog import get_entry, list_entries, run_all, run_entry
from .expr import (ExprError, ParseError, UnboundParameterError, compile_expr, differentiate,
                   parse, render)
from .feller import Domain, FellerConfig, parse_endpoint, recurrence_test
from .hardy import WeightPair, classify, derive_weight, sample_grid
from .spectral import hardy_problem, min_rayleigh, verify_inequality

SCHEMA = "hardy-forge/1"
EXIT_OK, EXIT_FAIL, EXIT_INDETERMINATE, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# JSON with fixed field order and 17 significant digits ---------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _dump(obj, indent=0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isfinite(obj):
            return format(obj, ".17g")
        return '"nan"' if math.isnan(obj) else ('"inf"' if obj > 0 else '"-inf"')
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + _dump(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (f"{inner}{json.dumps(k)}: {_dump(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON text (floats with 17 significant digits)."""
    return _dump(_plain(obj))


# shared argument handling -----------------------------------------------------

def _param(text):
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number in {text!r}") from None


def _interval(text):
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected l:r, got {text!r}")
    try:
        return parse_endpoint(lo), parse_endpoint(hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _truncation(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected a:b:n, got {text!r}")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad truncation {text!r}") from None


def _common(p, pair=True, need_v=True):
    p.add_argument("--param", action="append", type=_param, default=[], metavar="NAME=VALUE",
                   help="bind a parameter (repeatable)")
    p.add_argument("--var", default="x", help="name of the radial variable (default x)")
    p.add_argument("--json", action="store_true", help="print the JSON envelope")
    if pair:
        p.add_argument("--h", required=True, help="weight h (expression)")
        if need_v:
            p.add_argument("--V", required=True, help="weight V (expression)")
        p.add_argument("--dim", type=float, default=1.0, help="dimension d >= 1 (default 1)")
        p.add_argument("--interval", type=_interval, default=(0.0, math.inf),
                       help="domain l:r, endpoints may be inf/-inf (default 0:inf)")


def _feller_flags(p):
    p.add_argument("--shells", type=int, default=24, help="shells per endpoint (default 24)")
    p.add_argument("--ladder-factor", type=float, default=4.0,
                   help="geometric ratio between shells (default 4)")
    p.add_argument("--tolerance", type=float, default=1e-10,
                   help="relative quadrature tolerance (default 1e-10)")
    p.add_argument("--threshold", type=float, default=1e6,
                   help="divergence threshold for partial integrals (default 1e6)")
    p.add_argument("--base-point", type=float, default=None,
                   help="interior base point (default: from the interval)")


def _cfg(a) -> FellerConfig:
    return FellerConfig(base_point=a.base_point, ladder_factor=a.ladder_factor,
                        shells=a.shells, tolerance=a.tolerance,
                        divergence_threshold=a.threshold)


def _params(a) -> dict:
    return dict(a.param)


def _expr(text, a, what):
    try:
        return parse(text, a.var)
    except ParseError as exc:
        raise UsageError(f"cannot parse {what} {text!r}: {exc}") from None


def _pair(a, need_v=True) -> WeightPair:
    h = _expr(a.h, a, "h")
    V = _expr(a.V, a, "V") if need_v else parse("1")
    try:
        dom = Domain(a.interval[0], a.interval[1], a.dim)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return WeightPair(h, V, dom, _params(a))


# subcommands ------------------------------------------------------------------
# each returns (exit code, result payload, text lines)

def cmd_jd(a):
    phi = _expr(a.expr, a, "expression")
    J = j_op(phi, a.dim)
    result = {"expr": render(phi, a.var), "dim": a.dim, "J": render(J, a.var)}
    lines = [f"J^{a.dim:g}({render(phi, a.var)}) = {render(J, a.var)}"]
    if a.at:
        vals = compile_expr(J, _params(a))(np.array(a.at, dtype=float))
        result["values"] = [{a.var: x, "J": v} for x, v in zip(a.at, vals)]
        lines += [f"  at {a.var}={x:g}: {v:.17g}" for x, v in zip(a.at, vals)]
    return EXIT_OK, result, lines


def cmd_weight(a):
    wp = _pair(a)
    W = derive_weight(wp)
    grid = np.geomspace(0.1, 10, 5) if not wp.dom.finite else None
    if grid is None or not all(wp.dom.contains(x) for x in grid):
        grid = sample_grid(wp.dom, 64)[::13]
    vals = compile_expr(W, wp.params)(grid)
    report = classify(wp, _cfg(a))
    result = {"W": render(W, a.var),
              "samples": [{a.var: x, "W": v} for x, v in zip(grid, vals)],
              "classification": report.classification,
              "positivity": report.positivity.to_dict() if report.positivity else None,
              "notes": report.notes}
    lines = [f"W = {render(W, a.var)}"]
    lines += [f"  W({x:.6g}) = {v:.17g}" for x, v in zip(grid, vals)]
    lines.append(f"classification: {report.classification}")
    code = EXIT_INDETERMINATE if report.classification == "indeterminate" else EXIT_OK
    return code, result, lines


def cmd_feller(a):
    wp = _pair(a, need_v=False)
    v = recurrence_test(wp.h, wp.dom, _cfg(a), wp.params)
    lines = [f"left:  {v.left.describe()}", f"right: {v.right.describe()}",
             f"recurrent: {v.recurrent}"]
    code = EXIT_INDETERMINATE if v.recurrent == "indeterminate" else EXIT_OK
    return code, v.to_dict(), lines


def cmd_classify(a):
    wp = _pair(a)
    report = classify(wp, _cfg(a))
    result = report.to_dict(a.var)
    lines = [f"W = {result['W']}",
             f"recurrence (h): {report.recurrence.recurrent}",
             f"recurrence (V): {report.v_recurrence.recurrent}"]
    if report.positivity:
        lines.append(f"positivity: {report.positivity.describe()}")
    if report.optimality_integral:
        lines.append(f"int h W: {report.optimality_integral.describe()}")
    if report.spectral:
        s = report.spectral
        lines.append(f"inf W V = {s.lam:.17g} at {s.lam_at:.6g}; "
                     f"inf W = {s.lam_prime:.17g} at {s.lam_prime_at:.6g}")
    lines.append(f"boundary density: {result['boundary_density']}")
    lines.append(f"classification: {report.classification}")
    lines += [f"note: {n}" for n in report.notes]
    if a.expect:
        result["expected"] = a.expect
        result["match"] = report.classification == a.expect
        lines.append(f"expected {a.expect}: {'PASS' if result['match'] else 'FAIL'}")
        if not result["match"]:
            return EXIT_FAIL, result, lines
    if report.classification == "indeterminate":
        return EXIT_INDETERMINATE, result, lines
    return EXIT_OK, result, lines


def _default_truncations(dom):
    l, r = dom.l, dom.r
    if math.isfinite(l) and math.isfinite(r):
        span = r - l
        return [(l + 0.02 * span, r - 0.02 * span, 1000), (l + 0.01 * span, r - 0.01 * span, 2000)]
    if math.isfinite(l):
        return [(l + 1e-2, l + 1e2, 500), (l + 1e-3, l + 1e3, 2000)]
    raise UsageError("give --truncation for domains unbounded on the left")


def cmd_spectrum(a):
    wp = _pair(a)
    truncs = a.truncation or _default_truncations(wp.dom)
    W = derive_weight(wp) if a.weight is None else _expr(a.weight, a, "weight")
    if a.scale != 1.0:
        W = parse(str(a.scale)) * W
    if a.mass != "wv":
        origin = wp.dom.l if math.isfinite(wp.dom.l) else 0.0
        rows = []
        for lo, hi, n in truncs:
            prob = hardy_problem(wp.h, wp.V, W, wp.dom.d, lo, hi, n, wp.params, a.mass,
                                 origin=origin)
            res = min_rayleigh(prob, refine=a.refine)
            rows.append({"a": lo, "b": hi, "n": n, "min_eigenvalue": res.min_eigenvalue,
                         "history": res.to_dict()["history"]})
        lines = [f"[{r['a']:g}, {r['b']:g}] n={r['n']}: {r['min_eigenvalue']:.17g}" for r in rows]
        return EXIT_OK, {"mass": a.mass, "truncations": rows}, lines
    rep = verify_inequality(wp, W, truncs, shift=a.shift)
    result = {"W": render(W, a.var), "shift": a.shift, **rep.to_dict()}
    lines = [f"[{lo:g}, {hi:g}] n={n}: quotient {q:.17g}" for lo, hi, n, q in rep.quotients]
    lines.append(f"monotone: {rep.monotone}")
    if rep.note:
        lines.append(f"note: {rep.note}")
    lines.append(rep.verdict)
    code = {"PASS": EXIT_OK, "FAIL": EXIT_FAIL}.get(rep.verdict, EXIT_INDETERMINATE)
    return code, result, lines


def cmd_bessel(a):
    wp = _pair(a)
    W = derive_weight(wp) if a.weight is None else _expr(a.weight, a, "weight")
    lo, hi = a.interval
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise UsageError("bessel needs a bounded --interval")
    u = ground_state(wp.h, wp.V)
    grid = np.linspace(lo, hi, 258)[1:-1]
    res = ode_residual(u, wp.V, W, wp.dom.d, grid, wp.params)
    prob = OdeProblem(wp.V, W, wp.dom.d, lo, hi, x0=a.x0, step=a.step, params=wp.params)
    x0 = prob.start()
    gs = compile_expr(u, wp.params)
    dgs = compile_expr(differentiate(u), wp.params)
    prob.u0, prob.du0 = (float(gs(x0)), float(dgs(x0))) if a.u0 is None else (a.u0, a.du0)
    shot = shoot(prob)
    result = {"ground_state": render(u, a.var), "residual": res, "x0": x0,
              "u0": prob.u0, "du0": prob.du0, "shoot": shot.to_dict()}
    lines = [f"ground state: {render(u, a.var)}", f"residual on grid: {res:.3g}",
             f"shooting from {x0:.6g}: positive={shot.positive}"
             + (f", sign changes near {', '.join(f'{c:.6g}' for c in shot.sign_changes)}"
                if shot.sign_changes else "")
             + (f", stopped at {shot.truncated_at:.6g} (blow-up)" if shot.truncated else "")]
    return (EXIT_OK if shot.positive else EXIT_FAIL), result, lines


def cmd_catalog(a):
    if a.action == "list":
        entries = [e.describe() for e in list_entries()]
        lines = [f"{e['name']:22s} {', '.join(f'{k}={v:g}' for k, v in e['params'].items())}"
                 for e in entries]
        return EXIT_OK, {"entries": [{"name": e["name"], "params": e["params"],
                                      "templates": e["templates"]} for e in entries]}, lines
    if a.all == bool(a.name):
        raise UsageError("catalog run takes either an entry name or --all")
    overrides = _params(a)
    if a.psi:
        overrides["psi"] = a.psi
    cfg = _cfg(a)
    if a.all:
        reports = run_all(cfg=cfg, workers=a.workers)
    else:
        try:
            get_entry(a.name)
            reports = [run_entry(a.name, overrides, cfg)]
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    lines = []
    for r in reports:
        spec = "-" if r.spectral is None else r.spectral.verdict
        lines.append(f"{'PASS' if r.ok else 'FAIL'}  {r.name:22s} dev={r.deviation:.2e} "
                     f"class={r.classification} (expected {r.expected_classification}) "
                     f"spectral={spec} ode={r.ode_residual:.2e}")
        lines += [f"      constant {c.label}: expected {c.expected:.12g}, got {c.computed:.12g}"
                  for c in r.constants if not c.ok]
        if r.error:
            lines.append(f"      error: {r.error}")
    code = EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL
    return code, {"entries": [r.to_dict() for r in reports]}, lines


# parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hardy-forge", description="Hardy weights from pairs of radial weights.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("jd", help="symbolic J^d of an expression")
    s.add_argument("expr", help="positive function of the variable")
    _common(s, pair=False)
    s.add_argument("--dim", type=float, default=1.0, help="dimension d >= 1 (default 1)")
    s.add_argument("--at", type=float, action="append", default=[],
                   help="also evaluate at this point (repeatable)")
    s.set_defaults(run=cmd_jd)

    s = sub.add_parser("weight", help="derive W = J^d(h) - J^d(V) and classify it")
    _common(s)
    _feller_flags(s)
    s.set_defaults(run=cmd_weight)

    s = sub.add_parser("feller", help="recurrence of the form with weight h")
    _common(s, need_v=False)
    _feller_flags(s)
    s.set_defaults(run=cmd_feller)

    s = sub.add_parser("classify", help="full report: recurrence, positivity, optimality")
    _common(s)
    _feller_flags(s)
    s.add_argument("--expect", choices=["no_weight", "critical", "optimal", "indeterminate"],
                   help="exit 1 unless the classification matches")
    s.set_defaults(run=cmd_classify)

    s = sub.add_parser("spectrum", help="discrete Rayleigh quotients on truncations")
    _common(s)
    s.add_argument("--truncation", type=_truncation, action="append", default=[],
                   metavar="A:B:N", help="truncated interval and grid size (repeatable, "
                   "coarsest first)")
    s.add_argument("--mass", choices=["wv", "v", "lebesgue"], default="wv",
                   help="mass weight: W V (verify the inequality), V or 1 (bottom of spectrum)")
    s.add_argument("--weight", default=None, help="test this weight instead of the derived one")
    s.add_argument("--scale", type=float, default=1.0, help="multiply the weight by this factor")
    s.add_argument("--shift", type=float, default=0.0,
                   help="move shift*V from the weight to the energy side")
    s.add_argument("--refine", type=int, default=0, help="grid doublings recorded in history")
    s.set_defaults(run=cmd_spectrum)

    s = sub.add_parser("bessel", help="ground-state residual and shooting for the Bessel ODE")
    _common(s)
    s.add_argument("--weight", default=None, help="use this W instead of the derived one")
    s.add_argument("--x0", type=float, default=None, help="starting point (default midpoint)")
    s.add_argument("--u0", type=float, default=None,
                   help="initial value (default: the ground state at x0)")
    s.add_argument("--du0", type=float, default=0.0, help="initial slope when --u0 is given")
    s.add_argument("--step", type=float, default=1e-3, help="RK4 step (default 1e-3)")
    s.set_defaults(run=cmd_bessel)

    s = sub.add_parser("catalog", help="worked examples")
    s.add_argument("action", choices=["list", "run"])
    s.add_argument("name", nargs="?", help="entry to run")
    s.add_argument("--all", action="store_true", help="run every entry")
    s.add_argument("--psi", default=None, help="profile psi for model_manifold")
    s.add_argument("--workers", type=int, default=None, help="parallel workers for --all")
    _common(s, pair=False)
    _feller_flags(s)
    s.set_defaults(run=cmd_catalog)
    return p


def _echo(a) -> dict:
    skip = {"run", "json"}
    out = {}
    for k, v in sorted(vars(a).items()):
        if k in skip:
            continue
        if k == "param":
            v = dict(v)
        out[k] = v
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    t0 = time.perf_counter()
    try:
        code, result, lines = a.run(a)
    except UsageError as exc:
        print(f"hardy-forge {a.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnboundParameterError as exc:
        print(f"hardy-forge {a.command}: unbound parameter {exc.args[0]!r} "
              "(bind it with --param)", file=sys.stderr)
        return EXIT_USAGE
    except (ExprError, ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"hardy-forge {a.command}: {msg}", file=sys.stderr)
        return EXIT_USAGE
    wall = time.perf_counter() - t0
    if a.json:
        env = {"schema": SCHEMA, "version": __version__, "command": a.command,
               "params": _echo(a), "result": result}
        print(dumps(env))
    else:
        print("\n".join(lines))
        print(f"wall time {wall * 1e3:.0f} ms", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
