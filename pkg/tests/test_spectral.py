import math

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from hardyforge.expr import Const, parse
from hardyforge.feller import Domain
from hardyforge.hardy import WeightPair, derive_weight
from hardyforge.spectral import (SturmLiouvilleProblem, assemble, eigenvalue,
                                 hardy_problem, min_rayleigh, sturm_count,
                                 verify_inequality)


def classical(d=3):
    return WeightPair(parse("x^(2-d)"), Const(1), Domain(0, "inf", d), {"d": d})


def test_dirichlet_laplacian_on_zero_pi():
    res = min_rayleigh(SturmLiouvilleProblem(1, 1, 0, math.pi, 1000))
    assert res.min_eigenvalue == pytest.approx(1.0, rel=1e-5)


def test_dirichlet_laplacian_unit_interval():
    prob = SturmLiouvilleProblem(1, 1, 0, 1, 2000)
    assert min_rayleigh(prob).min_eigenvalue == pytest.approx(math.pi**2, rel=1e-4)
    for k in (1, 2, 3):
        assert eigenvalue(prob, k) == pytest.approx(k * k * math.pi**2, rel=1e-4)


@pytest.mark.parametrize("p, m, a, b", [("1", "1", 0, 1), ("1+x^2", "exp(x)", 0.5, 3),
                                        ("x^2", "0.25", 0.01, 10)])
def test_matches_dense_oracle(p, m, a, b):
    # symmetric scaling M^-1/2 K M^-1/2 is an ordinary tridiagonal problem
    pencil = assemble(SturmLiouvilleProblem(parse(p), parse(m), a, b, 300, log_map=False))
    s = 1 / np.sqrt(pencil.mass)
    w = eigh_tridiagonal(pencil.diag * s * s, pencil.off * s[:-1] * s[1:],
                         eigvals_only=True, select="i", select_range=(0, 2))
    prob = SturmLiouvilleProblem(parse(p), parse(m), a, b, 300, log_map=False)
    for k in (1, 2, 3):
        assert eigenvalue(prob, k) == pytest.approx(w[k - 1], rel=1e-9)


def test_eigenvector_is_mass_normalised():
    prob = SturmLiouvilleProblem(parse("1+x"), parse("2+x^2"), 0, 2, 400)
    res = min_rayleigh(prob)
    pencil = assemble(prob)
    assert np.sum(pencil.mass * res.eigenvector**2) == pytest.approx(1.0, abs=1e-8)
    # it is an eigenvector
    v = res.eigenvector
    kv = pencil.diag * v
    kv[:-1] += pencil.off * v[1:]
    kv[1:] += pencil.off * v[:-1]
    np.testing.assert_allclose(kv, res.min_eigenvalue * pencil.mass * v, atol=1e-6)
    assert np.all(v > -1e-12)


def test_sturm_count_is_monotone():
    pencil = assemble(SturmLiouvilleProblem(parse("1+x^2"), parse("x"), 0.1, 2, 200))
    counts = [sturm_count(pencil, s) for s in np.linspace(0, 5e4, 400)]
    assert all(c2 >= c1 for c1, c2 in zip(counts, counts[1:]))
    assert counts[0] == 0 and counts[-1] > 0


def test_partial_mass_and_minimal_grid():
    m = parse("x - 0.5 + abs(x - 0.5)")
    assert min_rayleigh(SturmLiouvilleProblem(1, m, 0, 1, 64)).min_eigenvalue > 0
    assemble(SturmLiouvilleProblem(1, 1, 0, 1, 16))
    with pytest.raises(ValueError):
        SturmLiouvilleProblem(1, 1, 0, 1, 15)
    with pytest.raises(ValueError):
        assemble(SturmLiouvilleProblem(1, 0, 0, 1, 32))
    with pytest.raises(ValueError):
        assemble(SturmLiouvilleProblem(parse("x - 0.5"), 1, 0, 1, 32))


def test_log_map_selection():
    assert SturmLiouvilleProblem(1, 1, 1e-3, 1e3, 32).mapped
    assert not SturmLiouvilleProblem(1, 1, 0.1, 10, 32).mapped
    assert SturmLiouvilleProblem(1, 1, 1.001, 20, 32, origin=1.0).mapped


def test_mapped_and_uniform_agree():
    kw = dict(a=0.5, b=4.0, n=4000)
    base = dict(p=parse("x^2"), m=parse("1+x"))
    u = min_rayleigh(SturmLiouvilleProblem(**base, **kw, log_map=False)).min_eigenvalue
    g = min_rayleigh(SturmLiouvilleProblem(**base, **kw, log_map=True)).min_eigenvalue
    assert u == pytest.approx(g, rel=1e-5)


def test_classical_hardy_quotients():
    wp = classical()
    W = derive_weight(wp)
    rep = verify_inequality(wp, W, [(1e-2, 1e2, 500), (1e-3, 1e3, 2000)])
    assert rep.verdict == "PASS" and rep.monotone
    q1, q2 = (q for *_, q in rep.quotients)
    assert 1 < q2 < q1
    # continuum value on [a, b] is 1 + (2 pi / log(b/a))^2
    assert q2 == pytest.approx(1 + (2 * math.pi / math.log(1e6)) ** 2, rel=1e-4)


def test_refinement_is_non_increasing():
    wp = classical()
    prob = hardy_problem(wp.h, wp.V, derive_weight(wp), 3, 1e-2, 1e2, 100, wp.params)
    hist = [v for _, v in min_rayleigh(prob, refine=3).history]
    assert all(b <= a * (1 + 1e-8) for a, b in zip(hist, hist[1:]))


def test_doubled_weight_fails():
    wp = classical()
    W2 = Const(2) * derive_weight(wp)
    rep = verify_inequality(wp, W2, [(1e-2, 1e2, 500), (1e-3, 1e3, 2000)])
    assert rep.verdict == "FAIL"
    assert rep.quotients[-1][-1] < 1


def test_zero_weight_is_vacuous():
    wp = classical()
    rep = verify_inequality(wp, Const(0), [(1e-2, 1e2, 100)])
    assert rep.verdict == "PASS" and rep.vacuous
    assert math.isinf(rep.quotients[0][-1])


def test_unevaluable_weight_is_inconclusive():
    wp = classical()
    rep = verify_inequality(wp, parse("log(x - 5)"), [(1e-2, 1e2, 100)])
    assert rep.verdict == "inconclusive"


def test_gegenbauer_lebesgue_bound():
    wp = WeightPair(parse("1-x^2"), parse("(1-x^2)^alpha"), Domain(-1, 1), {"alpha": 0.5})
    prob = hardy_problem(wp.h, wp.V, derive_weight(wp), 1, -0.999, 0.999, 2000,
                         wp.params, mass="lebesgue", log_map=False)
    assert min_rayleigh(prob).min_eigenvalue >= 0.5
