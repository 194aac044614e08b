"""
Expression trees for radial weights
===================================

A small symbolic layer for functions of one real variable with named
real parameters.  It covers exactly what the weight catalogue needs:
the four arithmetic operators, powers with arbitrary exponents, and the
functions ``log, exp, sqrt, abs, sinh, cosh, tanh, coth``.

Expressions are immutable trees.  They can be parsed from text, rendered
back, evaluated on scalars or numpy arrays, differentiated exactly and
lightly simplified.  Evaluation is strict: a NaN or infinity anywhere in
the tree raises :class:`DomainError` rather than leaking out as a number.

>>> e = parse("x^(2-d)")
>>> float(evaluate(e, 2.0, {"d": 3}))
0.5
>>> float(evaluate(differentiate(parse("x^2")), 3.0))
6.0
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from typing import Mapping, Union

import numpy as np

__all__ = [
    "Expr", "Const", "Var", "Param", "Add", "Sub", "Mul", "Div", "Pow", "Neg",
    "Func", "FUNCTIONS", "ExprError", "ParseError", "DomainError",
    "UnboundParameterError", "parse", "render", "evaluate", "differentiate",
    "simplify", "substitute", "as_expr", "parameters", "has_variable", "compile_expr",
]

FUNCTIONS = ("log", "exp", "sqrt", "abs", "sinh", "cosh", "tanh", "coth")

Number = Union[int, float]


class ExprError(Exception):
    """Base class for expression errors."""


class ParseError(ExprError):
    """Malformed expression text; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class DomainError(ExprError, ArithmeticError):
    """Evaluation produced a non-finite value."""


class UnboundParameterError(ExprError, KeyError):
    """A parameter in the tree has no binding."""

    def __str__(self):
        return f"unbound parameter {self.args[0]!r}"


# ---------------------------------------------------------------------------
# Node kinds
# ---------------------------------------------------------------------------

class Expr:
    """Base class of all expression nodes.

    Python operators build trees, so ``Var() ** 2 + 1`` is an ``Add``.
    Plain numbers are promoted to :class:`Const`.
    """

    __slots__ = ()
    precedence = 5

    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __pow__(self, other):
        return Pow(self, as_expr(other))

    def __rpow__(self, other):
        return Pow(as_expr(other), self)

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return render(self)


@dataclass(frozen=True, eq=True, repr=True, slots=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        if not math.isfinite(self.value):
            raise ExprError(f"non-finite constant {self.value!r}")


@dataclass(frozen=True, slots=True)
class Var(Expr):
    """The free variable.  The name only matters for rendering."""

    name: str = "x"

    def __eq__(self, other):
        return isinstance(other, Var)

    def __hash__(self):
        return hash(Var)


@dataclass(frozen=True, slots=True)
class Param(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class Add(Expr):
    left: Expr
    right: Expr
    precedence = 1


@dataclass(frozen=True, slots=True)
class Sub(Expr):
    left: Expr
    right: Expr
    precedence = 1


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    left: Expr
    right: Expr
    precedence = 2


@dataclass(frozen=True, slots=True)
class Div(Expr):
    left: Expr
    right: Expr
    precedence = 2


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr
    precedence = 3


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: Expr
    precedence = 4


@dataclass(frozen=True, slots=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ExprError(f"unknown function {self.name!r}")


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float, np.floating, np.integer)):
        return Const(float(value))
    if isinstance(value, str):
        return parse(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


def _children(e: Expr) -> tuple:
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base, e.exponent)
    if isinstance(e, (Neg, Func)):
        return (e.arg,)
    return ()


def parameters(e: Expr) -> set[str]:
    """Names of all parameters appearing in ``e``."""
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Param):
            out.add(node.name)
        stack.extend(_children(node))
    return out


def has_variable(e: Expr) -> bool:
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            return True
        stack.extend(_children(node))
    return False


# ---------------------------------------------------------------------------
# Parsing and rendering
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    # expr   := term (('+'|'-') term)*
    # term   := factor (('*'|'/') factor)*
    # factor := atom ('^' factor)? | '-' factor
    # atom   := number | identifier | identifier '(' expr ')' | '(' expr ')'

    def __init__(self, text, variable):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variable = variable

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {value!r}, found {what}", tok[2])
        return tok

    def parse(self):
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2])
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self):
        e = self.factor()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.factor()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def factor(self):
        if self.peek()[1] == "-":
            self.take()
            arg = self.factor()
            # keep negative literals as constants so rendering round-trips
            if isinstance(arg, Const):
                return Const(-arg.value)
            return Neg(arg)
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            return Pow(base, self.factor())
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            return Const(float(text))
        if kind == "ident":
            if self.peek()[1] == "(":
                if text not in FUNCTIONS:
                    raise ParseError(f"unknown function {text!r}", pos)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Func(text, arg)
            if text in FUNCTIONS:
                raise ParseError(f"function {text!r} needs an argument", pos)
            if text == self.variable:
                return Var(text)
            return Param(text)
        if text == "(":
            e = self.expr()
            self.expect(")")
            return e
        what = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"unexpected {what}", pos)


def parse(text: str, variable: str = "x") -> Expr:
    """Parse ``text`` into an expression tree.

    ``variable`` names the free variable; every other bare identifier is a
    parameter.  Raises :class:`ParseError` with the byte offset of the
    first offending token.
    """
    return _Parser(text, variable).parse()


def _fmt_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def render(e: Expr, variable: str | None = None) -> str:
    """Render ``e`` in the grammar accepted by :func:`parse`."""

    def wrap(child, min_prec):
        s = go(child)
        prec = child.precedence
        if isinstance(child, Const) and child.value < 0:
            prec = 3
        return f"({s})" if prec < min_prec else s

    def go(node):
        if isinstance(node, Const):
            return _fmt_number(node.value)
        if isinstance(node, Var):
            return variable or node.name
        if isinstance(node, Param):
            return node.name
        if isinstance(node, Add):
            return f"{wrap(node.left, 1)} + {wrap(node.right, 2)}"
        if isinstance(node, Sub):
            return f"{wrap(node.left, 1)} - {wrap(node.right, 2)}"
        if isinstance(node, Mul):
            return f"{wrap(node.left, 2)}*{wrap(node.right, 3)}"
        if isinstance(node, Div):
            return f"{wrap(node.left, 2)}/{wrap(node.right, 3)}"
        if isinstance(node, Neg):
            return f"-{wrap(node.arg, 3)}"
        if isinstance(node, Pow):
            return f"{wrap(node.base, 5)}^{wrap(node.exponent, 3)}"
        if isinstance(node, Func):
            return f"{node.name}({go(node.arg)})"
        raise TypeError(node)

    return go(e)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _coth(z):
    return 1.0 / np.tanh(z)


_NUMPY_FUNCS = {
    "log": np.log,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "coth": _coth,
}


def _log_coth(u):
    u = np.asarray(u, dtype=float)
    out = np.where(u > 0, np.log1p(2.0 / np.expm1(2.0 * np.abs(u))), np.nan)
    return out if out.ndim else float(out)


def _check(value, node):
    if not np.all(np.isfinite(value)):
        raise DomainError(f"non-finite value while evaluating {render(node)}")
    return value


def _pow(base, expo):
    # numpy accepts negative bases for integral float exponents
    return np.power(base, expo)


def compile_expr(e: Expr, params: Mapping[str, Number] | None = None):
    """Return a function of ``x`` (scalar or array) evaluating ``e``.

    Parameters are resolved once, at compile time, so an unbound parameter
    fails immediately.  The returned callable raises :class:`DomainError`
    on any non-finite intermediate value.
    """
    params = {} if params is None else params

    def build(node):
        if isinstance(node, Const):
            v = node.value
            return lambda x: v
        if isinstance(node, Var):
            return lambda x: x
        if isinstance(node, Param):
            try:
                v = float(params[node.name])
            except KeyError:
                raise UnboundParameterError(node.name) from None
            return lambda x: v
        if isinstance(node, (Add, Sub, Mul, Div, Pow)):
            a, b = (build(c) for c in _children(node))
            op = {Add: np.add, Sub: np.subtract, Mul: np.multiply,
                  Div: np.divide, Pow: _pow}[type(node)]
            return lambda x: _check(op(a(x), b(x)), node)
        if isinstance(node, Neg):
            a = build(node.arg)
            return lambda x: -a(x)
        if isinstance(node, Func):
            if node.name == "log" and isinstance(node.arg, Func) and node.arg.name == "coth":
                # coth rounds to 1 for moderate arguments; keep the small log exact
                a = build(node.arg.arg)
                return lambda x: _check(_log_coth(a(x)), node)
            a = build(node.arg)
            f = _NUMPY_FUNCS[node.name]
            return lambda x: _check(f(a(x)), node)
        raise TypeError(node)

    fn = build(e)

    def run(x):
        with np.errstate(all="ignore"):
            out = fn(np.asarray(x, dtype=float) if np.ndim(x) else float(x))
        if np.ndim(x) and np.ndim(out) == 0:
            out = np.full(np.shape(x), float(out))
        return out

    return run


def evaluate(e: Expr, x, params: Mapping[str, Number] | None = None):
    """Evaluate ``e`` at ``x`` (float or array) with parameter bindings."""
    return compile_expr(e, params)(x)


# ---------------------------------------------------------------------------
# Differentiation and simplification
# ---------------------------------------------------------------------------

ZERO = Const(0.0)
ONE = Const(1.0)


def differentiate(e: Expr) -> Expr:
    """Exact derivative with respect to the free variable.

    Powers with a variable exponent go through ``exp(q*log(b))``, which is
    only valid for positive bases.  The result is simplified.
    """
    return simplify(_diff(e))


def _diff(e):
    if isinstance(e, (Const, Param)):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Add):
        return Add(_diff(e.left), _diff(e.right))
    if isinstance(e, Sub):
        return Sub(_diff(e.left), _diff(e.right))
    if isinstance(e, Mul):
        return Add(Mul(_diff(e.left), e.right), Mul(e.left, _diff(e.right)))
    if isinstance(e, Div):
        u, v = e.left, e.right
        return Div(Sub(Mul(_diff(u), v), Mul(u, _diff(v))), Pow(v, Const(2)))
    if isinstance(e, Neg):
        return Neg(_diff(e.arg))
    if isinstance(e, Pow):
        b, q = e.base, e.exponent
        if not has_variable(q):
            return Mul(Mul(q, Pow(b, Sub(q, ONE))), _diff(b))
        return Mul(e, Add(Mul(_diff(q), Func("log", b)), Div(Mul(q, _diff(b)), b)))
    if isinstance(e, Func):
        u = e.arg
        du = _diff(u)
        name = e.name
        if name == "log":
            return Div(du, u)
        if name == "exp":
            return Mul(e, du)
        if name == "sqrt":
            return Div(du, Mul(Const(2), e))
        if name == "abs":
            return Mul(Div(u, e), du)
        if name == "sinh":
            return Mul(Func("cosh", u), du)
        if name == "cosh":
            return Mul(Func("sinh", u), du)
        if name == "tanh":
            return Mul(Sub(ONE, Pow(e, Const(2))), du)
        if name == "coth":
            return Mul(Sub(ONE, Pow(e, Const(2))), du)
    raise TypeError(e)


def _is(node, value):
    return isinstance(node, Const) and node.value == value


def _fold(op, a, b):
    with np.errstate(all="ignore"):
        try:
            v = op(a, b)
        except (ZeroDivisionError, OverflowError, ValueError):
            return None
    if isinstance(v, complex) or not math.isfinite(v):
        return None
    return Const(v)


def substitute(e: Expr, params: Mapping[str, Number] | None) -> Expr:
    """Replace bound parameters by constants and simplify.

    Unbound parameters are left in place.  Folding the values in lets
    :func:`simplify` drop factors such as ``f^0`` that would otherwise be
    evaluated (and may overflow) at every point.
    """
    if not params:
        return e

    def go(node):
        if isinstance(node, Param):
            return Const(float(params[node.name])) if node.name in params else node
        if isinstance(node, (Const, Var)):
            return node
        if isinstance(node, (Neg, Func)):
            return replace(node, arg=go(node.arg))
        if isinstance(node, Pow):
            return Pow(go(node.base), go(node.exponent))
        return type(node)(go(node.left), go(node.right))

    return simplify(go(e))


def simplify(e: Expr) -> Expr:
    """Shallow bottom-up cleanup.

    Folds constant subtrees and removes the identities ``e*0``, ``e*1``,
    ``e+0``, ``e-0``, ``e/1``, ``e^1``, ``e^0``, ``--e``.  No
    canonicalization beyond that.
    """
    if isinstance(e, (Const, Var, Param)):
        return e
    if isinstance(e, Neg):
        a = simplify(e.arg)
        if isinstance(a, Const):
            return Const(-a.value)
        if isinstance(a, Neg):
            return a.arg
        return Neg(a)
    if isinstance(e, Func):
        a = simplify(e.arg)
        if isinstance(a, Const):
            with np.errstate(all="ignore"):
                v = float(_NUMPY_FUNCS[e.name](a.value))
            if math.isfinite(v):
                return Const(v)
        return Func(e.name, a)
    if isinstance(e, Pow):
        b, q = simplify(e.base), simplify(e.exponent)
        if _is(q, 0):
            return ONE
        if _is(q, 1):
            return b
        if _is(b, 1):
            return ONE
        if isinstance(b, Const) and isinstance(q, Const):
            folded = _fold(lambda u, v: u ** v, b.value, q.value)
            if folded is not None:
                return folded
        return Pow(b, q)
    a, b = simplify(e.left), simplify(e.right)
    if isinstance(e, Add):
        if _is(a, 0):
            return b
        if _is(b, 0):
            return a
        if isinstance(a, Const) and isinstance(b, Const):
            return Const(a.value + b.value)
        if isinstance(b, Neg):
            return Sub(a, b.arg)
        return Add(a, b)
    if isinstance(e, Sub):
        if _is(b, 0):
            return a
        if _is(a, 0):
            return simplify(Neg(b))
        if isinstance(a, Const) and isinstance(b, Const):
            return Const(a.value - b.value)
        if a == b and isinstance(a, (Var, Param)):
            return ZERO
        return Sub(a, b)
    if isinstance(e, Mul):
        if _is(a, 0) or _is(b, 0):
            return ZERO
        if _is(a, 1):
            return b
        if _is(b, 1):
            return a
        if _is(a, -1):
            return simplify(Neg(b))
        if _is(b, -1):
            return simplify(Neg(a))
        if isinstance(a, Const) and isinstance(b, Const):
            return _fold(lambda u, v: u * v, a.value, b.value) or Mul(a, b)
        return Mul(a, b)
    if isinstance(e, Div):
        if _is(a, 0) and not _is(b, 0):
            return ZERO
        if _is(b, 1):
            return a
        if isinstance(a, Const) and isinstance(b, Const):
            return _fold(lambda u, v: u / v, a.value, b.value) or Div(a, b)
        return Div(a, b)
    raise TypeError(e)
