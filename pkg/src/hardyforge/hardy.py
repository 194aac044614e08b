"""
Hardy weights from pairs of radial weights
==========================================

Given strictly positive radial weights ``h`` and ``V`` on an annulus
``{l < |x| < r}`` in dimension ``d``, the function

    W = J^d(h) - J^d(V)

satisfies, for compactly supported smooth ``u``,

    int u^2 W V t^(d-1) dt <= int u'^2 V t^(d-1) dt.

If the form with weight ``h`` is recurrent and ``W >= 0``, then ``W`` is
a critical Hardy weight; if moreover ``int h W t^(d-1) dt`` diverges it
is optimal.  If the form with weight ``V`` is itself recurrent no Hardy
weight exists at all.  :func:`classify` runs this chain and collects
the evidence into a :class:`HardyReport`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.optimize import minimize_scalar

from .calculus import j_op
from .expr import (Add, Const, Div, Expr, ExprError, Mul, Neg, Sub, Var, as_expr,
                    compile_expr, differentiate, render, simplify, substitute)
from .feller import (Domain, FellerConfig, IntegralVerdict, RecurrenceVerdict,
                     classify_endpoint_integral, recurrence_test)

__all__ = [
    "WeightPair", "Positivity", "SpectralBounds", "QuadraticForm", "HardyReport",
    "sample_grid", "representable", "derive_weight", "positivity_scan", "optimality_test",
    "boundary_density", "spectral_lower_bounds", "quadratic_positivity",
    "power_binomial_quadratic", "classify",
]

CLOSABILITY_NOTE = ("closability of the form with weight h on C_0^infinity is "
                    "assumed, not checked")


@dataclass(frozen=True)
class WeightPair:
    """The weights ``h`` and ``V`` on ``dom`` with their parameter bindings."""

    h: Expr
    V: Expr
    dom: Domain
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "h", as_expr(self.h))
        object.__setattr__(self, "V", as_expr(self.V))
        object.__setattr__(self, "params", dict(self.params))

    def check_positive(self, n: int = 256):
        """Raise ``ValueError`` unless ``h`` and ``V`` are positive on the sample grid.

        Points where either weight over- or underflows double precision
        are skipped (see :func:`representable`).
        """
        grid = sample_grid(self.dom, n)
        for name, e in (("h", self.h), ("V", self.V)):
            try:
                vals, ok = representable(e, grid, self.params, nonzero=True)
            except ExprError as exc:
                raise ValueError(f"{name} cannot be evaluated on the domain: {exc}") from exc
            if not ok.any():
                raise ValueError(f"{name} cannot be evaluated anywhere on the domain")
            bad = ok & (vals <= 0)
            if bad.any():
                i = int(np.argmax(bad))
                raise ValueError(f"{name} is not positive at x={grid[i]:.6g} "
                                 f"(value {vals[i]:.6g})")


def representable(e, grid, params=None, nonzero: bool = False):
    """Evaluate ``e`` on ``grid`` and flag the points where it is finite.

    Returns ``(values, mask)``; masked-out values are NaN.  With
    ``nonzero`` an exact zero also counts as unrepresentable (underflow
    of a positive weight such as ``exp(-x^2)``).  Unbound parameters
    still raise.
    """
    fn = compile_expr(as_expr(e), params)
    grid = np.asarray(grid, dtype=float)
    try:
        vals = np.asarray(fn(grid), dtype=float)
    except ExprError as exc:
        if isinstance(exc, KeyError):
            raise
        vals = np.full(grid.shape, np.nan)
        for i, x in enumerate(grid):
            try:
                vals[i] = fn(x)
            except ExprError:
                pass
    ok = np.isfinite(vals)
    if nonzero:
        ok &= vals != 0
    return np.where(ok, vals, np.nan), ok


def sample_grid(dom: Domain, n: int = 512, cutoff: float = 1e3,
                gap: float = 1e-6) -> np.ndarray:
    """Sample points for scanning a weight on ``dom``.

    Finite endpoints are approached geometrically down to ``gap`` times
    the span (or times 1 when the other end is infinite); infinite ones
    are truncated at ``cutoff`` in magnitude.  The interior is sampled
    uniformly on bounded intervals (the midpoint is always included) and
    log-uniformly on half-lines.
    """
    l, r = dom.l, dom.r
    if math.isfinite(l) and math.isfinite(r):
        span = r - l
        delta = gap * span
        m = n // 4
        left = l + np.geomspace(delta, 0.1 * span, m)
        right = r - np.geomspace(delta, 0.1 * span, m)
        k = n - 2 * m
        k += 1 - k % 2
        mid = np.linspace(l + 0.1 * span, r - 0.1 * span, k)
        pts = np.concatenate([left, mid, right, [0.5 * (l + r)]])
    elif math.isfinite(l):
        start = l + gap
        hi = max(cutoff, l + cutoff)
        pts = np.concatenate([l + np.geomspace(gap, 1.0, n // 2),
                              np.geomspace(max(l + 1.0, 1.0), hi, n - n // 2)])
        pts = pts[pts >= start]
    elif math.isfinite(r):
        pts = -sample_grid(Domain(-r, math.inf), n, cutoff, gap)[::-1]
    else:
        half = np.geomspace(gap, cutoff, n // 2)
        pts = np.concatenate([-half[::-1], [0.0], half])
    pts = np.unique(pts)
    return pts[(pts > l) & (pts < r)]


def derive_weight(wp: WeightPair) -> Expr:
    """``W = J^d(h) - J^d(V)`` for the pair's dimension."""
    return simplify(j_op(wp.h, wp.dom.d) - j_op(wp.V, wp.dom.d))


@dataclass
class Positivity:
    nonnegative: bool
    margin: float | None = None
    witness: float | None = None
    value: float | None = None

    def describe(self) -> str:
        if self.nonnegative:
            return f"Nonnegative(margin={self.margin:.6g})"
        return f"Negative(x={self.witness:.6g}, W={self.value:.6g})"

    def to_dict(self):
        return {"nonnegative": self.nonnegative, "margin": self.margin,
                "witness": self.witness, "value": self.value}


def _additive_terms(e: Expr, cap: int = 64) -> list:
    """Split ``e`` into summands, distributing products and quotients over sums.

    Stops splitting (returns ``[e]``) once more than ``cap`` terms appear.
    """
    if isinstance(e, Add):
        out = _additive_terms(e.left, cap) + _additive_terms(e.right, cap)
    elif isinstance(e, Sub):
        out = _additive_terms(e.left, cap) + [Neg(t) for t in _additive_terms(e.right, cap)]
    elif isinstance(e, Neg):
        out = [Neg(t) for t in _additive_terms(e.arg, cap)]
    elif isinstance(e, Mul):
        out = [Mul(a, b) for a in _additive_terms(e.left, cap)
               for b in _additive_terms(e.right, cap)]
    elif isinstance(e, Div):
        out = [Div(t, e.right) for t in _additive_terms(e.left, cap)]
    else:
        return [e]
    return out if len(out) <= cap else [e]


def _cancellation_scale(W: Expr, grid, params) -> np.ndarray:
    """Pointwise ``sum |term|`` over the summands of ``W``: the size of the
    numbers that cancel, which bounds the round-off in ``W`` itself."""
    total = np.zeros(len(grid))
    for t in _additive_terms(W):
        vals, ok = representable(t, grid, params)
        total += np.where(ok, np.abs(np.nan_to_num(vals, posinf=0.0, neginf=0.0)), 0.0)
    return total


def positivity_scan(W, dom: Domain, n: int = 512, params=None,
                    rel_tol: float = 1e-10) -> Positivity:
    """Scan ``W`` on :func:`sample_grid`.

    A value counts as zero when it is above ``-rel_tol`` times the sum of
    the absolute values of the summands of ``W`` at that point, which is
    the round-off allowance for weights that vanish identically.  Returns
    the minimum as margin, or the first grid point where ``W`` is clearly
    negative.
    """
    if n < 64:
        raise ValueError("positivity scan needs n >= 64")
    grid = sample_grid(dom, n)
    vals, ok = representable(W, grid, params)
    if not ok.any():
        raise ExprError("W cannot be evaluated anywhere on the sample grid")
    grid, vals = grid[ok], vals[ok]
    floor = -rel_tol * np.maximum(_cancellation_scale(as_expr(W), grid, params), np.abs(vals))
    bad = np.nonzero(vals < floor)[0]
    if bad.size:
        i = int(bad[0])
        return Positivity(False, witness=float(grid[i]), value=float(vals[i]))
    return Positivity(True, margin=float(np.min(vals)))


def _both_ends(f, dom, cfg, params) -> IntegralVerdict:
    left = classify_endpoint_integral(f, "left", dom, cfg, params)
    right = classify_endpoint_integral(f, "right", dom, cfg, params)
    evidence = left.evidence[::-1] + right.evidence
    if left.divergent or right.divergent:
        div = left if left.divergent else right
        return IntegralVerdict("divergent", rate=div.rate, exponent=div.exponent,
                               evidence=evidence,
                               note=f"left {left.describe()}, right {right.describe()}")
    if left.convergent and right.convergent:
        return IntegralVerdict("convergent", value=right.value - left.value,
                               tail=abs(left.tail or 0.0) + abs(right.tail or 0.0),
                               evidence=evidence)
    return IntegralVerdict("indeterminate", evidence=evidence,
                           note=f"left {left.describe()}, right {right.describe()}")


def optimality_test(wp: WeightPair, W, cfg: FellerConfig | None = None) -> IntegralVerdict:
    """Classify ``int h W t^(d-1) dt`` over the whole domain.

    Divergent when either endpoint diverges, convergent when both converge.
    """
    d = wp.dom.d
    f = wp.h * as_expr(W)
    if d != 1:
        f = f * Var() ** (d - 1)
    return _both_ends(substitute(f, wp.params), wp.dom, cfg, wp.params)


def boundary_density(wp: WeightPair) -> Expr:
    """``B = (h'/h V - V')/2``, the surface term density on a sphere ``|x| = R``.

    With this density,
    ``int u^2 W V dx + int_{|x|=R} u^2 B dsigma <= int |grad u|^2 V dx``
    for smooth ``u`` on the closed ball, the derivative taken along the
    outward radius.
    """
    h, V = wp.h, wp.V
    return simplify(Const(0.5) * (differentiate(h) / h * V - differentiate(V)))


@dataclass
class SpectralBounds:
    lam: float
    lam_at: float
    lam_prime: float
    lam_prime_at: float

    def to_dict(self):
        return {"lambda": self.lam, "lambda_at": self.lam_at,
                "lambda_prime": self.lam_prime, "lambda_prime_at": self.lam_prime_at}


def _grid_inf(fn, grid):
    vals = np.asarray(fn(grid), dtype=float)
    i = int(np.argmin(vals))
    best_x, best = float(grid[i]), float(vals[i])
    # polish an interior grid minimum between its neighbours
    if 0 < i < len(grid) - 1:
        lo, hi = float(grid[i - 1]), float(grid[i + 1])
        try:
            res = minimize_scalar(lambda t: float(fn(t)), bounds=(lo, hi),
                                  method="bounded", options={"xatol": 1e-12})
            if res.success and res.fun < best:
                best_x, best = float(res.x), float(res.fun)
        except ExprError:
            pass
    return best, best_x


def spectral_lower_bounds(W, V, dom: Domain, n: int = 512, params=None) -> SpectralBounds:
    """Grid infima ``lambda = inf W V`` and ``lambda' = inf W`` with their abscissae.

    These bound the bottom of the spectrum from below: the quotient
    ``int u'^2 V / int u^2`` is at least ``lambda`` and
    ``int u'^2 V / int u^2 V`` is at least ``lambda'``.
    """
    if n < 64:
        raise ValueError("need n >= 64")
    W, V = as_expr(W), as_expr(V)
    grid = sample_grid(dom, n)
    WV = simplify(W * V)
    _, ok_wv = representable(WV, grid, params)
    _, ok_w = representable(W, grid, params)
    if not (ok_wv.any() and ok_w.any()):
        raise ExprError("W cannot be evaluated anywhere on the sample grid")
    lam, lam_at = _grid_inf(compile_expr(WV, params), grid[ok_wv])
    lamp, lamp_at = _grid_inf(compile_expr(W, params), grid[ok_w])
    return SpectralBounds(lam, lam_at, lamp, lamp_at)


@dataclass(frozen=True)
class QuadraticForm:
    """``q(X) = a X^2 + b X + c``, studied on ``0 < X < 1``."""

    a: float
    b: float
    c: float

    @property
    def axis(self) -> float:
        return -self.b / (2 * self.a) if self.a != 0 else math.nan

    @property
    def discriminant(self) -> float:
        return self.b ** 2 - 4 * self.a * self.c

    def __call__(self, X):
        return (self.a * X + self.b) * X + self.c


def quadratic_positivity(q: QuadraticForm) -> str:
    """Decide the sign of ``q`` on the open interval ``(0, 1)``.

    Returns ``"positive"`` when ``q > 0`` throughout, ``"boundary"`` when
    ``q >= 0`` with a double root inside, ``"not_positive"`` otherwise.
    """
    q0, q1 = q.c, q.a + q.b + q.c
    if q.a <= 0:
        # concave (or linear): the infimum sits at an endpoint
        if q0 >= 0 and q1 >= 0 and not (q.a == 0 and q0 == 0 and q1 == 0):
            return "positive"
        return "not_positive"
    A, D = q.axis, q.discriminant
    if A <= 0:
        return "positive" if q0 >= 0 else "not_positive"
    if A >= 1:
        return "positive" if q1 >= 0 else "not_positive"
    if D < 0:
        return "positive"
    if D == 0:
        return "boundary"
    return "not_positive"


def power_binomial_quadratic(d, m, alpha, beta) -> QuadraticForm:
    """The quadratic ``U`` with ``W = U(X)/x^2``, ``X = b x^alpha/(a + b x^alpha)``,
    for ``h = x^(2-d)`` and ``V = (a + b x^alpha)^beta / x^(2m)``."""
    k = (d - 2 * m - 2) / 2
    a2 = 0.25 * alpha ** 2 * beta ** 2 - 0.5 * alpha ** 2 * beta
    a1 = 0.5 * alpha ** 2 * beta + k * alpha * beta
    return QuadraticForm(a2, a1, k ** 2)


@dataclass
class HardyReport:
    W: Expr
    recurrence: RecurrenceVerdict
    v_recurrence: RecurrenceVerdict
    positivity: Positivity | None
    classification: str
    optimality_integral: IntegralVerdict | None
    spectral: SpectralBounds | None
    boundary_density: Expr
    notes: list = field(default_factory=list)

    def to_dict(self, variable: str = "x") -> dict:
        return {
            "W": render(self.W, variable),
            "classification": self.classification,
            "recurrence": self.recurrence.to_dict(),
            "v_recurrence": self.v_recurrence.to_dict(),
            "positivity": self.positivity.to_dict() if self.positivity else None,
            "optimality_integral": (self.optimality_integral.to_dict()
                                    if self.optimality_integral else None),
            "spectral": self.spectral.to_dict() if self.spectral else None,
            "boundary_density": render(self.boundary_density, variable),
            "notes": list(self.notes),
        }


def classify(wp: WeightPair, cfg: FellerConfig | None = None, n: int = 512) -> HardyReport:
    """Run the recurrence / positivity / optimality chain for ``wp``.

    Sub-results that cannot be decided degrade the classification to
    ``"indeterminate"``; nothing here raises on a numerical verdict.
    Classifications: ``"no_weight"``, ``"critical"``, ``"optimal"``,
    ``"indeterminate"``.
    """
    wp.check_positive()
    notes = [CLOSABILITY_NOTE]
    W = derive_weight(wp)
    B = boundary_density(wp)
    v_rec = recurrence_test(wp.V, wp.dom, cfg, wp.params)
    h_rec = recurrence_test(wp.h, wp.dom, cfg, wp.params)
    try:
        spectral = spectral_lower_bounds(W, wp.V, wp.dom, n, wp.params)
    except ExprError as exc:
        spectral = None
        notes.append(f"spectral bounds unavailable: {exc}")

    def report(cls, pos=None, opt=None):
        return HardyReport(W, h_rec, v_rec, pos, cls, opt, spectral, B, notes)

    if v_rec.recurrent == "yes":
        notes.append("the form with weight V is recurrent: no Hardy weight exists")
        return report("no_weight")
    if h_rec.recurrent != "yes":
        notes.append(f"recurrence of the h-form is {h_rec.recurrent}")
        return report("indeterminate")
    try:
        pos = positivity_scan(W, wp.dom, n, wp.params)
    except ExprError as exc:
        notes.append(f"W cannot be evaluated on the grid: {exc}")
        return report("indeterminate")
    if not pos.nonnegative:
        notes.append(f"W is negative at x={pos.witness:.6g}")
        return report("indeterminate", pos)
    opt = optimality_test(wp, W, cfg)
    if opt.divergent:
        return report("optimal", pos, opt)
    if opt.convergent:
        return report("critical", pos, opt)
    notes.append("optimality integral is indeterminate")
    return report("indeterminate", pos, opt)
