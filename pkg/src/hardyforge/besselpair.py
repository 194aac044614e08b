"""
Bessel-pair ODE
===============

A pair ``(V, W)`` is a Bessel pair on ``(0, R)`` in dimension ``d`` when

    u'' + ((d-1)/x + V'/V) u' + W u = 0

has a positive solution.  For ``W = J^d(h) - J^d(V)`` the function
``sqrt(h/V)`` is one, so the residual of that candidate is an
independent check on the weight.  :func:`shoot` integrates the ODE from
an interior point with classical RK4 and halves the step whenever the
solution or its derivative moves by more than 10% in one step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import _dim, log_derivative
from .expr import Const, Expr, Var, as_expr, compile_expr, differentiate, simplify

__all__ = ["ground_state", "ode_residual", "OdeProblem", "ShootResult", "shoot"]

BLOWUP = 1e12


def ground_state(h, V) -> Expr:
    """``(h/V)^(1/2)``."""
    return simplify((as_expr(h) / as_expr(V)) ** Const(0.5))


def _drift(V, d) -> Expr:
    return simplify((_dim(d) - Const(1.0)) / Var() + log_derivative(V))


def ode_residual(u, V, W, d, grid, params=None) -> float:
    """Max over ``grid`` of ``|u'' + ((d-1)/x + V'/V) u' + W u|``."""
    u = as_expr(u)
    du = differentiate(u)
    res = differentiate(du) + _drift(V, d) * du + as_expr(W) * u
    g = np.asarray(grid, dtype=float)
    return float(np.max(np.abs(compile_expr(res, params)(g))))


@dataclass
class OdeProblem:
    """Initial value problem for the Bessel-pair ODE.

    ``u0``/``du0`` are prescribed at ``x0``; the default ``x0`` is the
    geometric midpoint of ``[a, b]`` (arithmetic when ``a <= 0``).
    """

    V: Expr
    W: Expr
    d: float
    a: float
    b: float
    u0: float = 1.0
    du0: float = 0.0
    x0: float | None = None
    step: float = 1e-3
    params: dict = field(default_factory=dict)

    def start(self) -> float:
        if self.x0 is not None:
            return self.x0
        if self.a > 0:
            return math.sqrt(self.a * self.b)
        return 0.5 * (self.a + self.b)


@dataclass
class ShootResult:
    x: np.ndarray
    u: np.ndarray
    du: np.ndarray
    positive: bool
    sign_changes: list
    truncated: bool
    truncated_at: float | None = None

    def to_dict(self):
        return {"positive": self.positive, "sign_changes": self.sign_changes,
                "truncated": self.truncated, "truncated_at": self.truncated_at,
                "samples": len(self.x), "u_min": float(np.min(self.u)),
                "u_max": float(np.max(self.u))}


def _march(coefficients, x0, y0, end, step):
    """RK4 from ``x0`` to ``end`` (either direction); returns samples and blow-up point."""
    sgn = 1.0 if end > x0 else -1.0
    span = abs(end - x0)
    hmin = max(span, 1.0) * 1e-12
    h0 = min(step, span)
    x, (u, v) = x0, (float(y0[0]), float(y0[1]))
    xs, ys = [x], [(u, v)]
    ref_u, ref_v = max(abs(u), 1e-300), max(abs(v), 1e-300)

    def f(x, u, v):
        p, q = coefficients(x)
        return v, -p * v - q * u

    h = h0
    while sgn * (end - x) > hmin:
        h = min(h, abs(end - x))
        s = sgn * h
        a1, b1 = f(x, u, v)
        a2, b2 = f(x + s / 2, u + s / 2 * a1, v + s / 2 * b1)
        a3, b3 = f(x + s / 2, u + s / 2 * a2, v + s / 2 * b2)
        a4, b4 = f(x + s, u + s * a3, v + s * b3)
        u_new = u + s / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        v_new = v + s / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        # 10% of the current size, floored by a small fraction of the largest
        # size seen so far so zero crossings do not stall the march
        too_big = (abs(u_new - u) > 0.1 * max(abs(u), 1e-3 * ref_u)
                   or abs(v_new - v) > 0.1 * max(abs(v), 1e-3 * ref_v))
        finite = math.isfinite(u_new) and math.isfinite(v_new)
        if (too_big or not finite) and h > hmin:
            h /= 2
            continue
        x += s
        u, v = u_new, v_new
        ref_u, ref_v = max(ref_u, abs(u)), max(ref_v, abs(v))
        xs.append(x)
        ys.append((u, v))
        if abs(u) > BLOWUP or not finite:
            return xs, ys, x
        h = min(2 * h, h0)
    return xs, ys, None


def shoot(problem: OdeProblem) -> ShootResult:
    """Integrate both ways from ``x0`` and report positivity of ``u``."""
    pr = problem
    fd = compile_expr(_drift(pr.V, pr.d), pr.params)
    fw = compile_expr(as_expr(pr.W), pr.params)

    cache = {}

    def coefficients(x):
        # RK4 revisits x + h/2 and the step end, so memoise the last few
        if x not in cache:
            if len(cache) > 8:
                cache.clear()
            xv = np.array([x])
            cache[x] = (float(fd(xv)[0]), float(fw(xv)[0]))
        return cache[x]

    x0 = pr.start()
    if not pr.a < x0 < pr.b:
        raise ValueError("x0 must lie strictly inside (a, b)")
    y0 = (pr.u0, pr.du0)
    xl, yl, stop_l = _march(coefficients, x0, y0, pr.a, pr.step)
    xr, yr, stop_r = _march(coefficients, x0, y0, pr.b, pr.step)
    xs = np.array(xl[::-1] + xr[1:])
    ys = np.array(yl[::-1] + yr[1:])
    u, du = ys[:, 0], ys[:, 1]
    flips = np.nonzero(np.sign(u[:-1]) * np.sign(u[1:]) < 0)[0]
    changes = [float(0.5 * (xs[i] + xs[i + 1])) for i in flips]
    stops = [s for s in (stop_l, stop_r) if s is not None]
    return ShootResult(xs, u, du, bool(np.all(u > 0)), changes, bool(stops),
                       stops[0] if stops else None)
