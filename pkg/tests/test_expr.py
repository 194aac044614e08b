import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardyforge.expr import (Const, DomainError, Func, Param, ParseError, Pow, Sub, Var,
                             UnboundParameterError, differentiate, evaluate, parse,
                             render, simplify)

from conftest import SAFE_GRID, random_positive_expr


def test_parse_power_with_parameter_exponent():
    assert parse("x^(2-d)") == Pow(Var(), Sub(Const(2), Param("d")))


def test_parse_declared_variable():
    e = parse("sinh(r)^(d-1)", variable="r")
    assert e == Pow(Func("sinh", Var()), Sub(Param("d"), Const(1)))


def test_parse_error_is_located():
    with pytest.raises(ParseError) as info:
        parse("x^")
    assert info.value.offset == 2


@pytest.mark.parametrize("text", ["foo(x)", "x +* 2", "(x", "x)", "", "2 x"])
def test_parse_rejects_non_grammar(text):
    with pytest.raises(ParseError):
        parse(text)


def test_evaluate_examples():
    assert evaluate(parse("x^(2-d)"), 2.0, {"d": 3}) == pytest.approx(0.5)
    assert evaluate(parse("log(x)"), 1.0) == 0.0
    with pytest.raises(DomainError):
        evaluate(parse("log(x)"), -1.0)


def test_unbound_parameter():
    with pytest.raises(UnboundParameterError):
        evaluate(parse("x^d"), 2.0)


def test_derivative_examples():
    assert evaluate(differentiate(parse("x^2")), 3.0) == pytest.approx(6.0)
    assert evaluate(differentiate(parse("sinh(x)")), 0.0) == pytest.approx(1.0)
    f = parse("log(coth(x/2))")
    h = 1e-5
    fd = (evaluate(f, 1 + h) - evaluate(f, 1 - h)) / (2 * h)
    assert abs(evaluate(differentiate(f), 1.0) - fd) <= 1e-8


@pytest.mark.parametrize("text, value", [("(x*1)+0", None), ("2+3", 5.0), ("x^0", 1.0)])
def test_simplify_examples(text, value):
    s = simplify(parse(text))
    if value is None:
        assert s == Var()
    else:
        assert s == Const(value)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_derivative_matches_central_differences(seed):
    e = random_positive_expr(np.random.default_rng(seed), depth=3)
    x = SAFE_GRID
    h = 1e-5 * x
    fd = (evaluate(e, x + h) - evaluate(e, x - h)) / (2 * h)
    sym = evaluate(differentiate(e), x)
    scale = np.maximum(np.abs(sym), np.abs(evaluate(e, x)) / x)
    assert np.all(np.abs(sym - fd) <= 1e-6 * scale)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_simplify_and_render_preserve_values(seed):
    e = random_positive_expr(np.random.default_rng(seed), depth=3)
    ref = evaluate(e, SAFE_GRID)
    np.testing.assert_allclose(evaluate(simplify(e), SAFE_GRID), ref, rtol=1e-12)
    np.testing.assert_allclose(evaluate(parse(render(e)), SAFE_GRID), ref, rtol=1e-12)


def test_expression_parameter_exponent_derivative():
    # variable exponent goes through exp(g log f)
    e = parse("x^x")
    assert evaluate(differentiate(e), 2.0) == pytest.approx(4 * (math.log(2) + 1))
