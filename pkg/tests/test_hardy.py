import numpy as np
import pytest

from hardyforge.calculus import j_op
from hardyforge.expr import Const, evaluate, parse
from hardyforge.feller import Domain
from hardyforge.hardy import (QuadraticForm, WeightPair, boundary_density, classify,
                              derive_weight, optimality_test, positivity_scan,
                              power_binomial_quadratic, quadratic_positivity,
                              sample_grid, spectral_lower_bounds)

X = np.geomspace(1e-2, 1e2, 257)


def pair(h, V, lo, hi, dim, /, **params):
    return WeightPair(parse(h), parse(V), Domain(lo, hi, dim), params)


def test_classical_hardy_weight():
    wp = pair("x^(2-d)", "1", 0, "inf", 3, d=3)
    np.testing.assert_allclose(evaluate(derive_weight(wp), X, wp.params),
                               0.25 / X**2, rtol=1e-12)


def test_equal_weights_give_zero():
    wp = pair("(1+x^2)^0.7", "(1+x^2)^0.7", 0, "inf", 3)
    assert np.max(np.abs(evaluate(derive_weight(wp), X))) <= 1e-12


def test_ckn_weight_example():
    wp = pair("x^(2-d)", "x^(-2*a)", 0, "inf", 5, d=5, a=0.5)
    np.testing.assert_allclose(evaluate(derive_weight(wp), X, wp.params) * X**2, 1.0,
                               rtol=1e-10)


@pytest.mark.parametrize("d", [3, 4, 5, 2.5, 7])
@pytest.mark.parametrize("a", [-1.5, -1, 0, 0.25, 0.5])
def test_ckn_closed_form_grid(d, a):
    if d - 2 * a - 2 == 0:
        pytest.skip("constant vanishes")
    wp = pair("x^(2-d)", "x^(-2*a)", 0, "inf", d, d=d, a=a)
    got = evaluate(derive_weight(wp), X, wp.params) * X**2
    np.testing.assert_allclose(got, ((d - 2 * a - 2) / 2) ** 2, rtol=1e-10)


def test_leray_weight():
    wp = pair("x^(2-d)*(log(R) - log(x))", "1", 0, 1, 2, d=2, R=1)
    x = np.linspace(0.01, 0.99, 99)
    np.testing.assert_allclose(evaluate(derive_weight(wp), x, wp.params),
                               1 / (4 * x**2 * np.log(x) ** 2), rtol=1e-9)


@pytest.mark.parametrize("d, delta, gamma", [(3, 1, 0.5), (4, 0, 1), (5, 2, 0.3)])
def test_gaussian_three_term_identity(d, delta, gamma):
    wp = pair("x^(2-d)", "x^(-delta)*exp(-gamma*x^2)", 0, "inf", d,
              d=d, delta=delta, gamma=gamma)
    x = np.linspace(0.1, 5, 200)
    want = ((d - delta - 2) / 2) ** 2 / x**2 - (d - delta) * gamma + gamma**2 * x**2
    np.testing.assert_allclose(evaluate(derive_weight(wp), x, wp.params), want, rtol=1e-9)


@pytest.mark.parametrize("c1, c2", [(3.0, 1.0), (0.01, 50.0), (1.0, 7.5)])
def test_weight_is_scale_invariant(c1, c2):
    wp = pair("(1+x^2)^(-0.5)", "(1+x^2)^2", 0, "inf", 3)
    scaled = pair(f"{c1}*(1+x^2)^(-0.5)", f"{c2}*(1+x^2)^2", 0, "inf", 3)
    a = evaluate(derive_weight(wp), X)
    b = evaluate(derive_weight(scaled), X)
    assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(a))


def test_sample_grid_policy():
    g = sample_grid(Domain(0, 1), 256)
    assert np.all(np.diff(g) > 0) and g[0] > 0 and g[-1] < 1
    assert g[0] == pytest.approx(1e-6, rel=1e-6)
    assert 1 - g[-1] == pytest.approx(1e-6, rel=1e-6)
    g = sample_grid(Domain(0, "inf", 3), 256)
    assert g[-1] == pytest.approx(1e3)


def test_positivity_examples():
    dom = Domain(0, "inf", 3)
    pos = positivity_scan(parse("1/(4*x^2)"), dom)
    assert pos.nonnegative and pos.margin > 0
    alpha, d = 2.0, 3
    wp = pair("(1+x^2)^((2-d)/2)", "(1+x^2)^alpha", 0, "inf", d, d=d, alpha=alpha)
    assert positivity_scan(derive_weight(wp), dom, params=wp.params).nonnegative
    swapped = j_op(Const(1), 3) - j_op(parse("x^(-1)"), 3)
    neg = positivity_scan(swapped, dom)
    assert not neg.nonnegative
    assert neg.value == pytest.approx(-0.25 / neg.witness**2, rel=1e-9)


def test_optimality_examples():
    d = 3
    wp = pair("(1+x^2)^((2-d)/2)", "(1+x^2)^alpha", 0, "inf", d, d=d, alpha=2.5)
    assert optimality_test(wp, derive_weight(wp)).divergent
    wp = pair("(1+x^2)^(2-alpha)", "(1+x^2)^alpha", 0, "inf", d, d=d, alpha=4)
    W = parse("2*d*(alpha-1)/(1+x^2)")
    np.testing.assert_allclose(evaluate(derive_weight(wp), X, wp.params),
                               evaluate(W, X, wp.params), rtol=1e-9)
    assert optimality_test(wp, W).convergent
    wp = pair("x^(2-d)", "1", 0, "inf", 3, d=3)
    assert optimality_test(wp, parse("0.25/x^2")).divergent


@pytest.mark.parametrize("d, a, R", [(3, 0.5, 1.0), (5, -1, 2.0), (4, 1, 0.5)])
def test_boundary_density_ckn(d, a, R):
    wp = pair("x^(2-d)", "x^(-2*a)", 0, "inf", d, d=d, a=a)
    B = evaluate(boundary_density(wp), R, wp.params)
    assert B == pytest.approx((2 - d + 2 * a) / (2 * R ** (2 * a + 1)), rel=1e-10)


def test_boundary_density_trivial():
    for h, V in [("(1+x^2)^3", "(1+x^2)^3"), ("2", "5")]:
        wp = pair(h, V, 0, "inf", 3)
        B = evaluate(boundary_density(wp), X)
        scale = np.abs(evaluate(parse(V), X)) / X
        assert np.all(np.abs(B) <= 1e-12 * scale)


def test_gegenbauer_lambda():
    wp = pair("1-x^2", "(1-x^2)^alpha", -1, 1, 1, alpha=0.5)
    sb = spectral_lower_bounds(derive_weight(wp), wp.V, wp.dom, params=wp.params)
    assert sb.lam == pytest.approx(0.5, abs=1e-8)
    assert abs(sb.lam_at) <= 1e-4


def test_zero_weight_bounds():
    sb = spectral_lower_bounds(Const(0), Const(1), Domain(0, 1))
    assert (sb.lam, sb.lam_prime) == (0.0, 0.0)


def test_quadratic_examples():
    q = power_binomial_quadratic(5, 0, 1, 1)
    assert quadratic_positivity(q) == "positive"
    assert quadratic_positivity(QuadraticForm(0, 0, 1)) == "positive"
    assert quadratic_positivity(QuadraticForm(1, -1, 0)) == "not_positive"
    # opens upward, vertex at 0.5 inside, two real roots
    assert quadratic_positivity(QuadraticForm(1, -1, 0.2)) == "not_positive"
    assert quadratic_positivity(QuadraticForm(1, -1, 0.25)) == "boundary"


@pytest.mark.parametrize("d, m, alpha, beta", [(5, 0, 1, 1), (6, 1, 2, 0.5), (4, 0, 3, 2)])
def test_power_binomial_quadratic_matches_weight(d, m, alpha, beta):
    q = power_binomial_quadratic(d, m, alpha, beta)
    k = (d - 2 * m - 2) / 2
    assert q(0.0) == pytest.approx(k**2, abs=1e-12)
    assert q(1.0) == pytest.approx(((alpha * beta + d - 2 * m - 2) / 2) ** 2, abs=1e-12)
    wp = pair("x^(2-d)", "(a + b*x^alpha)^beta/x^(2*m)", 0, "inf", d,
              d=d, m=m, alpha=alpha, beta=beta, a=1.0, b=1.0)
    Xq = X**alpha / (1 + X**alpha)
    np.testing.assert_allclose(evaluate(derive_weight(wp), X, wp.params) * X**2, q(Xq),
                               rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("h, alpha, expected", [
    ("(1+x^2)^((2-d)/2)", -1.0, "no_weight"),
    ("(1+x^2)^((2-d)/2)", 2.0, "optimal"),
    ("(1+x^2)^(2-alpha)", 4.0, "critical"),
])
def test_one_plus_x2_family_classification(h, alpha, expected):
    wp = pair(h, "(1+x^2)^alpha", 0, "inf", 3, d=3, alpha=alpha)
    report = classify(wp)
    assert report.classification == expected
    if expected == "optimal":
        assert report.optimality_integral.divergent
    if expected == "critical":
        assert report.optimality_integral.convergent


def test_classify_is_deterministic():
    wp = pair("x^(2-d)", "1", 0, "inf", 3, d=3)
    a, b = classify(wp).to_dict(), classify(wp).to_dict()
    assert a == b and a["classification"] == "optimal"


def test_non_positive_weights_rejected():
    with pytest.raises(ValueError):
        classify(pair("x - 0.5", "1", 0, 1, 1))


def test_negative_dip_next_to_steep_singularity():
    # W = 1/(16 x^2) - 1.5 gamma + gamma^2 x^2 dips to -gamma near x = 0.7,
    # far below round-off even though |W| reaches 1e10 at the grid's inner end
    wp = pair("x^(2-d)", "x^(-delta)*exp(-gamma*x^2)", 0, "inf", 3,
              d=3, delta=1.5, gamma=0.5)
    pos = positivity_scan(derive_weight(wp), wp.dom, params=wp.params)
    assert not pos.nonnegative and pos.value < -0.01 and 0.1 < pos.witness < 2


def test_cancelling_zero_weight_is_nonnegative():
    # large equal terms cancel to round-off only
    wp = pair("(1+x^2)^5*exp(x)", "exp(x)*(1+x^2)^5", 0, "inf", 3)
    assert positivity_scan(derive_weight(wp), wp.dom).nonnegative
