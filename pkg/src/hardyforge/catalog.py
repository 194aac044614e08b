"""
Worked examples
===============

Each :class:`CatalogEntry` bundles a weight pair ``(h, V)`` on a domain,
the closed form its Hardy weight should reduce to, the constants that
go with it and the expected classification.  :func:`run_entry` derives
everything from scratch and compares.

Expressions are stored as text so an entry can be printed, overridden
and re-parsed; parameters are ordinary names bound from ``params``.
Hyperbolic and model-manifold entries use the one-dimensional operator
with the volume density folded into ``V``; their ``params["d"]`` is the
manifold dimension, not the operator dimension.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .besselpair import ground_state, ode_residual
from .expr import Const, ExprError, compile_expr, differentiate, parse, render
from .feller import Domain, FellerConfig, parse_endpoint
from .hardy import (WeightPair, _cancellation_scale, boundary_density, classify, derive_weight,
                    power_binomial_quadratic, quadratic_positivity)
from .spectral import verify_inequality

__all__ = ["CatalogEntry", "ConstantCheck", "EntryReport", "list_entries",
           "get_entry", "run_entry", "run_all", "DEVIATION_TOLERANCE",
           "ODE_TOLERANCE"]

DEVIATION_TOLERANCE = 1e-9
ODE_TOLERANCE = 1e-8


@dataclass
class ConstantCheck:
    """``relation`` is ``"eq"`` (two-sided) or ``"ge"`` (computed is a lower bound
    that must not undercut ``expected``); tolerances are relative to ``max(1, |expected|)``."""

    label: str
    expected: float
    computed: float
    tol: float = 1e-9
    relation: str = "eq"
    source: str = ""

    @property
    def ok(self) -> bool:
        if not (math.isfinite(self.expected) and math.isfinite(self.computed)):
            return False
        slack = self.tol * max(1.0, abs(self.expected))
        if self.relation == "ge":
            return self.computed >= self.expected - slack
        return abs(self.computed - self.expected) <= slack

    def to_dict(self):
        return {"label": self.label, "relation": self.relation,
                "expected": self.expected, "computed": self.computed,
                "tol": self.tol, "ok": self.ok, "source": self.source}


@dataclass(frozen=True)
class CatalogEntry:
    """One worked example.

    ``h``, ``V``, ``expected_W`` and ``alt_W`` are expression templates;
    ``{name}`` placeholders are filled from ``templates`` (used for the
    model manifold's profile ``psi``).  ``lo``/``hi``/``dim`` are
    expressions in the parameters.
    """

    name: str
    h: str
    V: str
    expected_W: str
    lo: str
    hi: str
    dim: str
    params: dict
    expected_classification: Callable[[dict], str]
    grid: Callable[[dict], np.ndarray]
    truncations: Callable[[dict], list] | None
    constants: Callable[["_Context"], list]
    notes: str
    variable: str = "x"
    alt_W: tuple = ()
    shift: str | None = None
    templates: dict = field(default_factory=dict)

    def bind(self, overrides=None) -> dict:
        params = dict(self.params)
        for k, v in (overrides or {}).items():
            if k in self.templates:
                continue
            if k not in params:
                raise KeyError(f"entry {self.name!r} has no parameter {k!r}")
            params[k] = float(v)
        return params

    def texts(self, overrides=None) -> dict:
        fill = dict(self.templates)
        fill.update({k: str(v) for k, v in (overrides or {}).items() if k in self.templates})
        if "psi" in fill:
            psi = parse(fill["psi"], self.variable)
            d1 = differentiate(psi)
            fill["dpsi"] = render(d1, self.variable)
            fill["ddpsi"] = render(differentiate(d1), self.variable)
        sub = (lambda s: s.format(**fill)) if fill else (lambda s: s)
        return {"h": sub(self.h), "V": sub(self.V), "expected_W": sub(self.expected_W),
                "alt_W": [sub(a) for a in self.alt_W]}

    def _value(self, text, params):
        if text in ("inf", "-inf"):
            return parse_endpoint(text)
        return float(compile_expr(parse(text), params)(np.array([1.0]))[0])

    def domain(self, params) -> Domain:
        return Domain(self._value(self.lo, params), self._value(self.hi, params),
                      self._value(self.dim, params))

    def pair(self, overrides=None) -> WeightPair:
        params = self.bind(overrides)
        t = self.texts(overrides)
        return WeightPair(parse(t["h"], self.variable), parse(t["V"], self.variable),
                          self.domain(params), params)

    def describe(self):
        return {"name": self.name, "h": self.h, "V": self.V,
                "expected_W": self.expected_W, "variable": self.variable,
                "interval": [self.lo, self.hi], "dim": self.dim,
                "params": dict(sorted(self.params.items())),
                "templates": dict(sorted(self.templates.items())),
                "notes": self.notes}


@dataclass
class _Context:
    wp: WeightPair
    W: object
    params: dict
    report: object

    def w(self, x):
        return compile_expr(self.W, self.params)(np.asarray(x, dtype=float))

    def at(self, x):
        return float(self.w(np.array([x]))[0])

    def f(self, text, x, variable="x"):
        return compile_expr(parse(text, variable), self.params)(np.asarray(x, dtype=float))


# grids ----------------------------------------------------------------------

def _lin(lo, hi, n=257):
    return lambda p: np.linspace(lo(p), hi(p), n)


def _geo(lo, hi, n=256):
    return lambda p: np.geomspace(lo(p), hi(p), n)


_HALF_LINE = [(1e-2, 1e2, 500), (1e-3, 1e3, 2000)]
_HYPERBOLIC = [(1e-2, 10.0, 1000), (1e-3, 20.0, 2000)]
_HYPERBOLIC_GRID = _lin(lambda p: 0.1, lambda p: 10.0, 256)


def _max_rel(a, b, scale=None):
    """Max of ``|a - b| / max(|b|, scale)``; ``scale`` guards points where ``b``
    is a near-cancellation of larger terms."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    den = np.abs(b) if scale is None else np.maximum(np.abs(b), scale)
    return float(np.max(np.abs(a - b) / np.maximum(den, 1e-300)))


def _extreme(values, target):
    """The sample farthest from ``target`` (so an ``eq`` check covers the whole grid)."""
    values = np.asarray(values, float)
    return float(values[np.argmax(np.abs(values - target))])


# constants ------------------------------------------------------------------

def _jacobi_constants(c):
    p = c.params
    al, be = p["alpha"], p["beta"]
    x = np.linspace(1e-3, 1 - 1e-3, 4001)
    U = c.w(x) * c.f("x^(beta+1)*(1-x)^(alpha+1)", x) / c.f("x^beta*(1-x)^alpha", x)
    bound = (abs(al * be) - al * be - al - be) / 2
    out = []
    if bound > 0:
        out.append(ConstantCheck("inf U >= (|ab| - ab - a - b)/2", bound, float(U.min()),
                                 1e-9, "ge", "lower-bound chain for U"))
    if al == -1 and be == -1:
        out.append(ConstantCheck("inf U at x = 1/2 (alpha = beta = -1)", 1.0,
                                 float(U.min()), 1e-6, "eq", "alpha = beta = -1"))
    return out


def _gegenbauer_constants(c):
    lam = c.report.spectral.lam
    return [ConstantCheck("lambda = inf W V", 1 - c.params["alpha"], lam, 1e-8, "eq",
                          "lambda equals 1 - alpha")]


def _ball_constants(c):
    k = ((c.params["d"] - 2) / 2) ** 2
    x = c.grid
    return [ConstantCheck("inf W x^2 >= ((d-2)/2)^2", k, float(np.min(c.w(x) * x * x)),
                          1e-9, "ge", "classical Hardy limit"),
            ConstantCheck("W x^2 as x -> 0", k, c.at(1e-8) * 1e-16, 1e-6, "eq",
                          "classical Hardy limit")]


def _ckn_constants(c):
    p = c.params
    d, a, R = p["d"], p["a"], p["R"]
    k = ((d - 2 * a - 2) / 2) ** 2
    x = c.grid
    B = compile_expr(boundary_density(c.wp), p)(np.array([R]))[0]
    return [ConstantCheck("W x^2 = ((d-2a-2)/2)^2", k, _extreme(c.w(x) * x * x, k), 1e-10,
                          "eq", "Caffarelli-Kohn-Nirenberg constant"),
            ConstantCheck("boundary density at R", (2 - d + 2 * a) / (2 * R ** (2 * a + 1)),
                          float(B), 1e-10, "eq",
                          "boundary term (Green-identity normalisation)")]


def _ball_log_constants(c):
    p = c.params
    x = c.grid
    k = ((p["d"] - 2) / 2) ** 2
    rest = (c.w(x) - k / x ** 2) * (x * (math.log(p["R"]) - np.log(x))) ** 2
    return [ConstantCheck("(W - ((d-2)/2)^2/x^2)(x(log R - log x))^2 = 1/4", 0.25,
                          _extreme(rest, 0.25), 1e-9, "eq", "Leray term")]


def _exterior_constants(c):
    k = ((c.params["d"] - 2) / 2) ** 2
    x = c.grid
    return [ConstantCheck("inf W x^2 >= ((d-2)/2)^2", k, float(np.min(c.w(x) * x * x)),
                          1e-9, "ge", "exterior Hardy constant")]


def _one_plus_x2_constants(c):
    p = c.params
    d, al = p["d"], p["alpha"]
    x = c.grid
    c1 = 0.25 * (2 * al + d - 2) * (2 * al - d - 2)
    c2 = 0.5 * d * (2 * al + d - 2)
    lhs = (c1 + c2) * (1 + x * x) ** (al - 1) - c1 * (1 + x * x) ** (al - 2)
    wv = c.w(x) * (1 + x * x) ** al
    z = _max_rel(wv, lhs) if np.all(lhs != 0) else float(np.max(np.abs(wv - lhs)))
    out = [ConstantCheck("(c1 + c2)(1+x^2)^(alpha-1) - c1 (1+x^2)^(alpha-2) vs W V "
                         "(max relative deviation)", 0.0, z, 1e-9, "eq",
                         "two-term identity for W V")]
    if al == (2 + d) / 2:
        out.append(ConstantCheck("W V / (1+x^2)^(d/2) = d^2", d * d,
                                 _extreme(wv / (1 + x * x) ** (d / 2), d * d), 1e-9, "eq",
                                 "alpha = (2+d)/2"))
    return out


def _critical_constants(c):
    p = c.params
    d, al = p["d"], p["alpha"]
    x = c.grid
    wv = c.w(x) * (1 + x * x) ** al
    out = [ConstantCheck("W' (1+x^2) = 2d(alpha-1)", 2 * d * (al - 1),
                         _extreme(c.w(x) * (1 + x * x), 2 * d * (al - 1)), 1e-9, "eq",
                         "critical weight 2d(alpha-1)/(1+x^2)")]
    if al == d:
        out.append(ConstantCheck("W V / (1+x^2)^(d-1) = 2d(d-1)", 2 * d * (d - 1),
                                 _extreme(wv / (1 + x * x) ** (d - 1), 2 * d * (d - 1)),
                                 1e-9, "eq", "alpha = d"))
    return out


def _power_binomial_constants(c):
    p = c.params
    d, m, al, be = p["d"], p["m"], p["alpha"], p["beta"]
    q = power_binomial_quadratic(d, m, al, be)
    u0 = ((d - 2 * m - 2) / 2) ** 2
    u1 = ((al * be + d - 2 * m - 2) / 2) ** 2
    # sample where X = b x^alpha/(a + b x^alpha) is within 1e-9 of 0 and of 1;
    # W x^2 = U(X) there up to O(1e-9)
    def x_at(X):
        return (p["a"] * X / (p["b"] * (1 - X))) ** (1 / al)

    small, large = x_at(1e-9), x_at(1 - 1e-9)
    return [ConstantCheck("U(0)", u0, q(0.0), 1e-12, "eq", "U(0)"),
            ConstantCheck("U(1)", u1, q(1.0), 1e-12, "eq", "U(1)"),
            ConstantCheck("W x^2 near X = 0", u0, c.at(small) * small ** 2, 1e-6, "eq",
                          "U(0)"),
            ConstantCheck("W x^2 near X = 1", u1, c.at(large) * large ** 2, 1e-6, "eq",
                          "U(1)")]


def _gaussian_constants(c):
    p = c.params
    d, de, ga = p["d"], p["delta"], p["gamma"]
    # W x^2 is a quadratic in x^2; a least-squares fit recovers all three coefficients
    x = c.grid
    coef = np.polyfit(x * x, c.w(x) * x * x, 2)
    src = "three-term weight"
    return [ConstantCheck("coefficient of 1/x^2", ((d - de - 2) / 2) ** 2, coef[2], 1e-9,
                          "eq", src),
            ConstantCheck("constant term", -(d - de) * ga, coef[1], 1e-9, "eq", src),
            ConstantCheck("coefficient of x^2", ga * ga, coef[0], 1e-9, "eq", src)]


def _hyperbolic_ak_constants(c):
    d = c.params["d"]
    return [ConstantCheck("inf W >= (d-1)^2/4", (d - 1) ** 2 / 4, c.report.spectral.lam_prime,
                          1e-9, "ge", "hyperbolic spectral gap")]


def _hyperbolic_family_constants(c):
    d, al = c.params["d"], c.params["alpha"]
    lam = ((d - 1) ** 2 - al * al) / 4
    # for large r, W = lambda + A/r + B/r^2 up to e^(-2r); solve at three radii
    rs = np.array([50.0, 75.0, 100.0])
    A = np.vstack([np.ones(3), 1 / rs, 1 / rs ** 2]).T
    lam_fit = float(np.linalg.solve(A, c.w(rs))[0])
    src = "lambda = (d-1)^2/4 - alpha^2/4"
    out = [ConstantCheck("lambda = lim W at infinity", lam, lam_fit, 1e-8, "eq", src),
           ConstantCheck("alpha = sqrt((d-1)^2 - 4 lambda)", al,
                         math.sqrt(max((d - 1) ** 2 - 4 * lam_fit, 0.0)), 1e-6, "eq",
                         "relation between alpha and lambda")]
    if d - al - 3 >= 0:
        out.append(ConstantCheck("inf W >= lambda", lam, c.report.spectral.lam_prime, 1e-9,
                                 "ge", "hyperbolic family spectral bound"))
    return out


def _hyperbolic_beta_constants(c):
    d, be = c.params["d"], c.params["beta"]
    r = 1e-4
    return [ConstantCheck("W r^2 as r -> 0", ((d - 2 - 2 * be) / 2) ** 2, c.at(r) * r * r,
                          1e-6, "eq", "alpha = d - 3 specialisation"),
            ConstantCheck("inf W >= d - 2", d - 2, c.report.spectral.lam_prime, 1e-9, "ge",
                          "alpha = d - 3 specialisation")]


def _logcoth_constants(c):
    h = compile_expr(c.wp.h, c.params)
    out = []
    # h(r)/(-r log r) = 1 + log 2/(-log r) + o(1): the approach to 1 is
    # logarithmic, so compare against the first-order law
    for r in (1e-6, 1e-30, 1e-300):
        ratio = float(h(np.array([r]))[0]) / (-r * math.log(r))
        out.append(ConstantCheck(f"h(r)/(-r log r) at r = {r:g} vs 1 + log 2/(-log r)",
                                 1 + math.log(2) / -math.log(r), ratio, 1e-3, "eq",
                                 "limit of h(r)/(-r log r) at 0"))
    out.append(ConstantCheck("h(50)", 1.0, float(h(np.array([50.0]))[0]), 1e-3, "eq",
                             "limit of h at infinity"))
    return out


def _model_constants(c):
    d = c.params["d"]
    r = 1e-4
    return [ConstantCheck("W r^2 as r -> 0 (psi ~ r)", ((d - 2) / 2) ** 2, c.at(r) * r * r,
                          1e-6, "eq", "Model manifolds")]


def _none(c):
    return []


# expected classifications ---------------------------------------------------

def _jacobi_class(p):
    al, be = p["alpha"], p["beta"]
    # V-form 1/(x^(beta+1) (1-x)^(alpha+1)) diverges at both ends iff both are >= 0
    if al >= 0 and be >= 0:
        return "no_weight"
    # AM-GM is attained inside (0, 1), so this is inf U exactly
    return "optimal" if abs(al * be) - al * be - al - be >= 0 else "indeterminate"


def _const(tag):
    return lambda p: tag


def _one_plus_x2_class(p):
    return "no_weight" if p["alpha"] <= (2 - p["d"]) / 2 else "optimal"


def _critical_class(p):
    edge = (2 + p["d"]) / 2
    if p["alpha"] > edge:
        return "critical"
    return "optimal" if p["alpha"] == edge else "indeterminate"


def _ckn_class(p):
    # the V-form x^(2a+1-d) is 1/x, hence recurrent, exactly when W vanishes
    return "no_weight" if p["d"] - 2 * p["a"] - 2 == 0 else "optimal"


def _gaussian_class(p):
    # V-form x^(delta+1-d) e^(gamma x^2) diverges at infinity, and at 0 when
    # d - delta >= 2, which makes the V-form recurrent.  Otherwise
    # min W = gamma (|d - delta - 2| - (d - delta)) is negative exactly when
    # d - delta > 1; for d - delta <= 1 the h-integral diverges like x^3.
    s = p["d"] - p["delta"]
    if s >= 2:
        return "no_weight"
    return "indeterminate" if s > 1 else "optimal"


# the entries ----------------------------------------------------------------

_ENTRIES = [
    CatalogEntry(
        name="jacobi01",
        h="x*(1-x)", V="x^(beta+1)*(1-x)^(alpha+1)",
        expected_W="(beta^2/4*x^(beta-1)*(1-x)^(alpha+1) + alpha^2/4*x^(beta+1)*(1-x)^(alpha-1)"
                   " - (beta*alpha+beta+alpha)/2*x^beta*(1-x)^alpha)/(x^(beta+1)*(1-x)^(alpha+1))",
        lo="0", hi="1", dim="1", params={"alpha": -1.0, "beta": -1.0},
        expected_classification=_jacobi_class,
        grid=_lin(lambda p: 0.01, lambda p: 0.99),
        truncations=lambda p: [(0.02, 0.98, 1000), (0.01, 0.99, 2000)],
        constants=_jacobi_constants,
        notes="Jacobi weights on (0, 1); the case alpha = beta = -1 "
              "uses 4x(1-x) <= 1. Lower bound for U from the AM-GM chain.",
    ),
    CatalogEntry(
        name="jacobi01_endpoint",
        h="x*(1-x)", V="x^(beta+1)*(1-x)^(alpha+1)",
        expected_W="(1/(4*x^2) + 1/(4*x))/(1-x)",
        lo="0", hi="1", dim="1", params={"alpha": 0.0, "beta": -1.0},
        expected_classification=_const("optimal"),
        grid=_lin(lambda p: 0.01, lambda p: 0.99),
        truncations=lambda p: [(0.02, 0.98, 1000), (0.01, 0.99, 2000)],
        constants=_none,
        notes="Jacobi weights with beta = -1 and alpha = 0: W V equals 1/(4x^2) + 1/(4x).",
    ),
    CatalogEntry(
        name="gegenbauer",
        h="1-x^2", V="(1-x^2)^alpha",
        expected_W="(alpha*(1-alpha)*(1-x^2)^(alpha-1) + (1-alpha)^2*(1-x^2)^(alpha-2))"
                   "/(1-x^2)^alpha",
        lo="-1", hi="1", dim="1", params={"alpha": 0.5},
        expected_classification=_const("optimal"),
        grid=_lin(lambda p: -0.99, lambda p: 0.99),
        truncations=lambda p: [(-0.98, 0.98, 1000), (-0.99, 0.99, 2000)],
        constants=_gegenbauer_constants,
        notes="Gegenbauer weights: lambda equals 1 - alpha (bottom of the spectrum bound).",
    ),
    CatalogEntry(
        name="ball_interior",
        h="x^(2-d) - R^(2-d)", V="1",
        expected_W="((d-2)/2*R^(d-2)/(x*(R^(d-2) - x^(d-2))))^2",
        lo="0", hi="R", dim="d", params={"d": 3.0, "R": 1.0},
        expected_classification=_const("optimal"),
        grid=_lin(lambda p: 0.01 * p["R"], lambda p: 0.99 * p["R"]),
        truncations=lambda p: [(0.02 * p["R"], 0.98 * p["R"], 2000),
                               (0.01 * p["R"], 0.99 * p["R"], 4000)],
        constants=_ball_constants,
        notes="Ball of radius R: h = x^(2-d) - R^(2-d), V = 1; classical Hardy in the limit R -> inf.",
    ),
    CatalogEntry(
        name="ckn",
        h="x^(2-d)", V="x^(-2*a)",
        expected_W="((d-2*a-2)/2)^2/x^2",
        lo="0", hi="inf", dim="d", params={"d": 5.0, "a": 0.5, "R": 1.0},
        expected_classification=_ckn_class,
        grid=_geo(lambda p: 0.1, lambda p: 10.0),
        truncations=lambda p: _HALF_LINE,
        constants=_ckn_constants,
        notes="Caffarelli-Kohn-Nirenberg weight and its boundary term on |x| = R.",
    ),
    CatalogEntry(
        name="ball_log",
        h="x^(2-d)*(log(R) - log(x))", V="1",
        expected_W="((d-2)/2)^2/x^2 + 1/(4*(x*(log(R) - log(x)))^2)",
        lo="0", hi="R", dim="d", params={"d": 3.0, "R": 1.0},
        expected_classification=_const("optimal"),
        grid=_lin(lambda p: 0.01 * p["R"], lambda p: 0.99 * p["R"]),
        truncations=lambda p: [(0.02 * p["R"], 0.98 * p["R"], 2000),
                               (0.01 * p["R"], 0.99 * p["R"], 4000)],
        constants=_ball_log_constants,
        notes="Ball with a logarithmic h: h = x^(2-d)(log R - log x), V = 1.",
    ),
    CatalogEntry(
        name="leray",
        h="x^(2-d)*(log(R) - log(x))", V="1",
        expected_W="((d-2)/2)^2/x^2 + 1/(4*(x*(log(R) - log(x)))^2)",
        lo="0", hi="R", dim="d", params={"d": 2.0, "R": 1.0},
        expected_classification=_const("optimal"),
        grid=_lin(lambda p: 0.01 * p["R"], lambda p: 0.99 * p["R"]),
        truncations=lambda p: [(0.02 * p["R"], 0.98 * p["R"], 2000),
                               (0.01 * p["R"], 0.99 * p["R"], 4000)],
        constants=_ball_log_constants,
        notes="d = 2 and R = 1: Leray's inequality with weight 1/(4(x log x)^2).",
    ),
    CatalogEntry(
        name="exterior",
        h="(x-R)*x^(1-d)", V="1",
        expected_W="(d-1)*(d-3)/(4*x^2) + 1/(4*(x-R)^2)",
        alt_W=("(d-2)^2/(4*x^2) + (1/(x-R)^2 - 1/x^2)/4",),
        lo="R", hi="inf", dim="d", params={"d": 3.0, "R": 1.0},
        expected_classification=_const("optimal"),
        grid=_geo(lambda p: 1.01 * p["R"], lambda p: 100 * p["R"]),
        truncations=lambda p: [(p["R"] + 1e-2, p["R"] + 1e2, 500),
                               (p["R"] + 1e-3, p["R"] + 1e3, 2000)],
        constants=_exterior_constants,
        notes="Exterior of a ball: h = (x-R)x^(1-d), V = 1, two closed forms of W.",
    ),
    CatalogEntry(
        name="exterior_log",
        h="x^(2-d)*(log(x) - log(R))", V="1",
        expected_W="((d-2)/2)^2/x^2 + 1/(4*(x*(log(x) - log(R)))^2)",
        lo="R", hi="inf", dim="d", params={"d": 3.0, "R": 1.0},
        expected_classification=_const("optimal"),
        grid=_geo(lambda p: 1.01 * p["R"], lambda p: 100 * p["R"]),
        truncations=lambda p: [(p["R"] + 1e-2, p["R"] + 1e2, 500),
                               (p["R"] + 1e-3, p["R"] + 1e3, 2000)],
        constants=_exterior_constants,
        notes="Exterior of a ball, logarithmic h: h = x^(2-d)(log x - log R), V = 1.",
    ),
    CatalogEntry(
        name="one_plus_x2",
        h="(1+x^2)^((2-d)/2)", V="(1+x^2)^alpha",
        expected_W="(2*alpha+d-2)^2/4*(1+x^2)^(-1) - (2*alpha+d-2)*(2*alpha-d-2)/4*(1+x^2)^(-2)",
        lo="0", hi="inf", dim="d", params={"d": 3.0, "alpha": 2.5},
        expected_classification=_one_plus_x2_class,
        grid=_geo(lambda p: 0.1, lambda p: 10.0),
        truncations=lambda p: _HALF_LINE if p["alpha"] > (2 - p["d"]) / 2 else None,
        constants=_one_plus_x2_constants,
        notes="V = (1+x^2)^alpha: W V as a two-term combination; no weight for "
              "alpha <= (2-d)/2, optimal above.",
    ),
    CatalogEntry(
        name="one_plus_x2_critical",
        h="(1+x^2)^(2-alpha)", V="(1+x^2)^alpha",
        expected_W="2*d*(alpha-1)*(1+x^2)^(-1)",
        lo="0", hi="inf", dim="d", params={"d": 3.0, "alpha": 3.0},
        expected_classification=_critical_class,
        grid=_geo(lambda p: 0.1, lambda p: 10.0),
        truncations=lambda p: _HALF_LINE,
        constants=_critical_constants,
        notes="h = (1+x^2)^(2-alpha): for alpha > (2+d)/2 the weight is critical, "
              "not optimal; alpha = d gives the constant 2d(d-1).",
    ),
    CatalogEntry(
        name="power_binomial",
        h="x^(2-d)", V="(a + b*x^alpha)^beta/x^(2*m)",
        expected_W="((alpha^2*beta^2/4 - alpha^2*beta/2)*(b*x^alpha/(a+b*x^alpha))^2"
                   " + (alpha^2*beta/2 + (d-2*m-2)/2*alpha*beta)*(b*x^alpha/(a+b*x^alpha))"
                   " + ((d-2*m-2)/2)^2)/x^2",
        lo="0", hi="inf", dim="d",
        params={"d": 5.0, "m": 0.0, "alpha": 1.0, "beta": 1.0, "a": 1.0, "b": 1.0},
        expected_classification=_const("optimal"),
        grid=_geo(lambda p: 0.1, lambda p: 10.0),
        truncations=lambda p: _HALF_LINE,
        constants=_power_binomial_constants,
        notes="Power-binomial V: W = U(X)/x^2 with X = b x^alpha/(a + b x^alpha); endpoint "
              "values U(0) = ((d-2m-2)/2)^2 and U(1) = ((alpha beta + d-2m-2)/2)^2.",
    ),
    CatalogEntry(
        name="gaussian",
        h="x^(2-d)", V="x^(-delta)*exp(-gamma*x^2)",
        expected_W="((d-delta-2)/2)^2/x^2 - (d-delta)*gamma + gamma^2*x^2",
        lo="0", hi="inf", dim="d", params={"d": 3.0, "delta": 1.0, "gamma": 0.5},
        expected_classification=_gaussian_class,
        grid=_lin(lambda p: 0.1, lambda p: 5.0),
        truncations=lambda p: [(1e-2, 4.0, 1000), (1e-3, 6.0, 2000)],
        shift="(d-delta)*gamma",
        constants=_gaussian_constants,
        notes="Gaussian measure: three-term weight for the measure x^(-delta) e^(-gamma x^2) dx. "
              "W changes sign, so the inequality is checked with (d-delta) gamma moved "
              "to the energy side.",
    ),
    CatalogEntry(
        name="hyperbolic_ak",
        h="r", V="sinh(r)^(d-1)",
        expected_W="1/(4*r^2) + (d-1)*(d-3)/(4*sinh(r)^2) + (d-1)^2/4",
        lo="0", hi="inf", dim="1", params={"d": 3.0}, variable="r",
        expected_classification=_const("optimal"),
        grid=_HYPERBOLIC_GRID,
        truncations=lambda p: _HYPERBOLIC,
        constants=_hyperbolic_ak_constants,
        notes="Hyperbolic space, h = r, V = sinh^(d-1) r; weight and spectral-gap "
              "inequality.",
    ),
    CatalogEntry(
        name="hyperbolic_family",
        h="r*(r/sinh(r))^alpha", V="sinh(r)^(d-1)",
        expected_W="(alpha+1)^2/(4*r^2) + alpha*(alpha+1)/2*(r*coth(r) - 1)/r^2"
                   " + (d+alpha-1)*(d-alpha-3)/(4*sinh(r)^2) + ((d-1)^2 - alpha^2)/4",
        lo="0", hi="inf", dim="1", params={"d": 4.0, "alpha": 1.0}, variable="r",
        expected_classification=_const("optimal"),
        grid=_HYPERBOLIC_GRID,
        truncations=lambda p: _HYPERBOLIC,
        constants=_hyperbolic_family_constants,
        notes="Hyperbolic space, h = r (r/sinh r)^alpha with g(r) = (r coth r - 1)/r^2; "
              "lambda = ((d-1)^2 - alpha^2)/4.",
    ),
    CatalogEntry(
        name="hyperbolic_beta",
        h="r*(r/sinh(r))^alpha", V="r^(-2*beta)*sinh(r)^(d-1)",
        expected_W="((alpha+1)^2/4 + beta^2 - (d-2)*beta)/r^2"
                   " + (alpha*(alpha+1)/2 - (d-1)*beta)*(r*coth(r) - 1)/r^2"
                   " + ((d-1)*(d-3) - alpha*(alpha+2))/(4*sinh(r)^2) + ((d-1)^2 - alpha^2)/4",
        alt_W=("((d-2-2*beta)/2)^2/r^2 + ((d-2)*(d-3)/2 - (d-1)*beta)*(r*coth(r) - 1)/r^2"
               " + (d-2)",),
        lo="0", hi="inf", dim="1", params={"d": 5.0, "alpha": 2.0, "beta": 0.25},
        variable="r",
        expected_classification=_const("optimal"),
        grid=_HYPERBOLIC_GRID,
        truncations=lambda p: _HYPERBOLIC,
        constants=_hyperbolic_beta_constants,
        notes="Hyperbolic space with V = r^(-2 beta) sinh^(d-1) r (the volume factor is sinh^(d-1)); "
              "the second closed form is the alpha = d - 3 specialisation and only "
              "applies there.",
    ),
    CatalogEntry(
        name="hyperbolic_logcoth",
        h="sinh(r)*log(coth(r/2))", V="sinh(r)^(d-1)",
        expected_W="((d-2)/2)^2/sinh(r)^2 + 1/(4*sinh(r)^2*log(coth(r/2))^2) + d*(d-2)/4",
        lo="0", hi="inf", dim="1", params={"d": 3.0}, variable="r",
        expected_classification=_const("optimal"),
        grid=_HYPERBOLIC_GRID,
        truncations=lambda p: _HYPERBOLIC,
        constants=_logcoth_constants,
        notes="Hyperbolic space, h = sinh r log coth(r/2); endpoint limits "
              "h(r)/(-r log r) -> 1 at 0 and h -> 1 at infinity.",
    ),
    CatalogEntry(
        name="model_manifold",
        h="r", V="({psi})^(d-1)",
        expected_W="1/(4*r^2) + (d-1)*(d-3)/4*(({dpsi})/({psi}))^2 + (d-1)/2*({ddpsi})/({psi})",
        lo="0", hi="inf", dim="1", params={"d": 3.0}, variable="r",
        templates={"psi": "sinh(r)"},
        expected_classification=_const("optimal"),
        grid=_HYPERBOLIC_GRID,
        truncations=lambda p: _HYPERBOLIC,
        constants=_model_constants,
        notes="Model manifolds with volume psi^(d-1) dr: J(V) in terms of "
              "psi'/psi and psi''/psi. psi ~ r near 0 is assumed, not checked.",
    ),
]

_BY_NAME = {e.name: e for e in _ENTRIES}


def list_entries() -> list:
    return list(_ENTRIES)


def get_entry(name: str) -> CatalogEntry:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise KeyError(f"unknown catalog entry {name!r}; "
                       f"known: {', '.join(_BY_NAME)}") from None


@dataclass
class EntryReport:
    name: str
    params: dict
    deviation: float
    alt_deviations: list
    classification: str
    expected_classification: str
    constants: list
    spectral: object
    ode_residual: float
    error: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def classification_match(self) -> bool:
        return self.classification == self.expected_classification

    @property
    def ok(self) -> bool:
        return (not self.error
                and self.deviation <= DEVIATION_TOLERANCE
                and all(a <= DEVIATION_TOLERANCE for a in self.alt_deviations)
                and self.classification_match
                and all(c.ok for c in self.constants)
                and (self.spectral is None or self.spectral.verdict == "PASS")
                and self.ode_residual <= ODE_TOLERANCE)

    def to_dict(self):
        return {
            "name": self.name, "ok": self.ok, "error": self.error,
            "params": dict(sorted(self.params.items())),
            "deviation": self.deviation, "alt_deviations": self.alt_deviations,
            "classification": self.classification,
            "expected_classification": self.expected_classification,
            "classification_match": self.classification_match,
            "constants": [c.to_dict() for c in self.constants],
            "spectral": None if self.spectral is None else self.spectral.to_dict(),
            "ode_residual": self.ode_residual,
            "extras": self.extras,
        }


def run_entry(name: str, overrides=None, cfg: FellerConfig | None = None,
              entry: CatalogEntry | None = None) -> EntryReport:
    """Derive everything for one entry and compare with its expectations.

    ``entry`` replaces the registered entry of that name (used to run
    a modified copy).
    """
    entry = entry or get_entry(name)
    wp = entry.pair(overrides)
    params = wp.params
    texts = entry.texts(overrides)
    grid = entry.grid(params)
    W = derive_weight(wp)
    w_vals = compile_expr(W, params)(grid)

    def deviation(text):
        expected = parse(text, entry.variable)
        e = compile_expr(expected, params)(grid)
        return _max_rel(w_vals, e, _cancellation_scale(expected, grid, params))

    report = classify(wp, cfg)
    expected_class = entry.expected_classification(params)
    ctx = _Context(wp, W, params, report)
    ctx.grid = grid
    error = ""
    try:
        constants = entry.constants(ctx)
    except (ExprError, ValueError, ZeroDivisionError) as exc:
        constants, error = [], f"constants: {exc}"
    spectral = None
    truncs = entry.truncations(params) if entry.truncations else None
    if truncs:
        shift = (float(compile_expr(parse(entry.shift), params)(np.array([1.0]))[0])
                 if entry.shift else 0.0)
        if not shift and report.positivity is not None and not report.positivity.nonnegative:
            # a sign-changing W: move its negative part to the energy side
            a, b, _ = max(truncs, key=lambda t: t[1] - t[0])
            w_min = float(np.min(compile_expr(W, params)(np.linspace(a, b, 4097))))
            shift = -1.05 * w_min if w_min < 0 else 0.0
        spectral = verify_inequality(wp, W, truncs, shift=shift)
    try:
        # the ground state is defined up to a factor: normalise it on the grid
        g = ground_state(wp.h, wp.V)
        size = float(np.max(np.abs(compile_expr(g, params)(grid))))
        ode = ode_residual(Const(1.0 / size) * g, wp.V, W, wp.dom.d, grid, params)
    except ExprError as exc:
        ode, error = math.inf, error or f"ode residual: {exc}"
    extras = {}
    if entry.name == "power_binomial":
        q = power_binomial_quadratic(params["d"], params["m"], params["alpha"], params["beta"])
        extras["quadratic"] = quadratic_positivity(q)
    return EntryReport(entry.name, params, deviation(texts["expected_W"]),
                       [deviation(a) for a in texts["alt_W"]
                        if entry.name != "hyperbolic_beta" or params["alpha"] == params["d"] - 3],
                       report.classification, expected_class, constants, spectral, ode,
                       error, extras)


def _run_named(args):
    name, overrides, cfg = args
    return run_entry(name, overrides, cfg)


def run_all(names=None, cfg: FellerConfig | None = None, workers: int | None = None) -> list:
    """Run several entries in parallel; results come back in catalogue order."""
    names = list(names or _BY_NAME)
    jobs = [(n, None, cfg) for n in names]
    if workers == 1 or len(jobs) == 1:
        return [_run_named(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_named, jobs))
