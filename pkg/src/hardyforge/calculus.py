"""
Radial operators
================

For a positive function ``phi`` of the radius ``x`` and a (possibly
fractional) dimension ``d >= 1``::

    J^d(phi) = 1/4 (phi'/phi)^2 - 1/2 phi''/phi - (d-1)/(2x) phi'/phi

This is the radial form of ``I(phi) = 1/4 |grad phi|^2/phi^2 - 1/2 Lap phi/phi``.
A Hardy weight for the pair ``(h, V)`` is ``W = J^d(h) - J^d(V)``.

Two algebraic identities are exposed as residual checks, evaluated on a
grid: the product rule

    J^d(phi psi) = J^d(phi) + J^d(psi) - 1/2 (phi'/phi)(psi'/psi)

and the dimension shift

    J^d(h) - J^d(V) = J^1(h x^(d-1)) - J^1(V x^(d-1)).
"""
from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .expr import Const, Expr, Var, as_expr, differentiate, evaluate, simplify

__all__ = [
    "log_derivative", "j_op", "i_radial", "product_rule_residual",
    "dimension_shift_residual",
]


def _dim(d) -> Expr:
    if isinstance(d, (Expr, str)):
        return as_expr(d)
    d = float(d)
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return Const(d)


def log_derivative(phi) -> Expr:
    """``phi'/phi`` as an expression."""
    phi = as_expr(phi)
    return simplify(differentiate(phi) / phi)


def j_op(phi, d) -> Expr:
    """Symbolic ``J^d(phi)``.

    ``d`` may be a number or an expression (typically ``Param("d")``).
    Positivity of ``phi`` is the caller's business: the expression only
    involves ``phi'/phi`` and ``phi''/phi``, so it is checked where the
    weights are sampled (see :mod:`hardyforge.hardy`).
    """
    phi = as_expr(phi)
    d = _dim(d)
    d1 = differentiate(phi)
    d2 = differentiate(d1)
    ratio1 = d1 / phi
    ratio2 = d2 / phi
    x = Var()
    e = (Const(0.25) * ratio1 ** 2
         - Const(0.5) * ratio2
         - (d - Const(1.0)) / (Const(2.0) * x) * ratio1)
    return simplify(e)


def i_radial(phi, d) -> Expr:
    """``I(phi)`` for a radial function; the same expression as :func:`j_op`."""
    return j_op(phi, d)


def _grid(grid):
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("grid must be a non-empty 1-d sequence")
    return g


def product_rule_residual(phi, psi, d, grid: Sequence[float],
                          params: Mapping[str, float] | None = None) -> float:
    """Max over ``grid`` of ``|J(phi psi) - J(phi) - J(psi) + 1/2 (phi'/phi)(psi'/psi)|``."""
    phi, psi = as_expr(phi), as_expr(psi)
    g = _grid(grid)
    lhs = evaluate(j_op(phi * psi, d), g, params)
    rhs = (evaluate(j_op(phi, d), g, params) + evaluate(j_op(psi, d), g, params)
           - 0.5 * evaluate(log_derivative(phi), g, params)
           * evaluate(log_derivative(psi), g, params))
    return float(np.max(np.abs(lhs - rhs)))


def dimension_shift_residual(h, V, d, grid: Sequence[float],
                             params: Mapping[str, float] | None = None) -> float:
    """Max over ``grid`` of ``|[J^d(h) - J^d(V)] - [J^1(h x^(d-1)) - J^1(V x^(d-1))]|``."""
    h, V = as_expr(h), as_expr(V)
    g = _grid(grid)
    vol = Var() ** (_dim(d) - Const(1.0))
    lhs = evaluate(j_op(h, d), g, params) - evaluate(j_op(V, d), g, params)
    rhs = evaluate(j_op(h * vol, 1), g, params) - evaluate(j_op(V * vol, 1), g, params)
    return float(np.max(np.abs(lhs - rhs)))
