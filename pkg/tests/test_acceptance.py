"""Acceptance criteria, one check per criterion.

Each ``criterion_N`` returns ``(ok, detail)``.  Under pytest every check is
a test and its PASS/FAIL line is repeated in the terminal summary; run the
file directly (``python3 tests/test_acceptance.py``) to get just the lines.
"""
import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import SAFE_GRID, random_positive_expr  # noqa: E402

from hardyforge.besselpair import ground_state, ode_residual  # noqa: E402
from hardyforge.calculus import dimension_shift_residual, product_rule_residual  # noqa: E402
from hardyforge.catalog import get_entry, list_entries  # noqa: E402
from hardyforge.expr import Const, compile_expr, parse  # noqa: E402
from hardyforge.feller import Domain, recurrence_test  # noqa: E402
from hardyforge.hardy import (QuadraticForm, WeightPair, boundary_density,  # noqa: E402
                              classify, derive_weight, power_binomial_quadratic,
                              quadratic_positivity, sample_grid, spectral_lower_bounds)
from hardyforge.spectral import (SturmLiouvilleProblem, eigenvalue,  # noqa: E402
                                 verify_inequality)

RESULTS = {}


def _rel(got, want):
    got, want = np.asarray(got, float), np.asarray(want, float)
    return float(np.max(np.abs(got - want) / np.maximum(np.abs(want), 1e-300)))


def _w(wp, x):
    return compile_expr(derive_weight(wp), wp.params)(np.asarray(x, float))


def criterion_1():
    worst = 0.0
    for d in (3, 4, 5):
        wp = WeightPair(parse("x^(2-d)"), Const(1), Domain(0, "inf", d), {"d": d})
        x = sample_grid(wp.dom, 256)
        worst = max(worst, _rel(_w(wp, x) * x**2, ((d - 2) / 2) ** 2))
    return worst <= 1e-10, f"max relative error {worst:.2e} (tol 1e-10)"


def criterion_2():
    worst_w = worst_b = 0.0
    for d in (3, 4, 5):
        for a in (-1, 0.5, 1):
            wp = WeightPair(parse("x^(2-d)"), parse("x^(-2*a)"), Domain(0, "inf", d),
                            {"d": d, "a": a})
            x = sample_grid(wp.dom, 256)
            k = ((d - 2 * a - 2) / 2) ** 2
            wx2 = _w(wp, x) * x**2
            # relative to k, absolute when k vanishes (d = 4, a = 1)
            worst_w = max(worst_w, float(np.max(np.abs(wx2 - k))) / max(k, 1.0))
            for R in (1.0, 2.0):
                B = float(compile_expr(boundary_density(wp), wp.params)(np.array([R]))[0])
                want = (2 - d + 2 * a) / (2 * R ** (2 * a + 1))
                worst_b = max(worst_b, abs(B - want) / max(abs(want), 1.0))
    ok = worst_w <= 1e-10 and worst_b <= 1e-10
    return ok, f"W x^2 error {worst_w:.2e}, boundary density error {worst_b:.2e} (tol 1e-10)"


def criterion_3():
    e = get_entry("leray")
    wp = e.pair()
    x = e.grid(wp.params)
    err = _rel(_w(wp, x) * (x * np.log(x)) ** 2, 0.25)
    return err <= 1e-9, f"max relative error {err:.2e} on {len(x)} points (tol 1e-9)"


def criterion_4():
    worst, where = 0.0, 0.0
    for alpha in (0.25, 0.5, 0.75):
        wp = get_entry("gegenbauer").pair({"alpha": alpha})
        W = derive_weight(wp)
        sb = spectral_lower_bounds(W, wp.V, wp.dom, params=wp.params)
        at0 = float(compile_expr(W * wp.V, wp.params)(np.array([0.0]))[0])
        worst = max(worst, abs(sb.lam - (1 - alpha)), abs(at0 - (1 - alpha)))
        where = max(where, abs(sb.lam_at))
    ok = worst <= 1e-8 and where <= 1e-4
    return ok, f"max |lambda - (1 - alpha)| = {worst:.2e} (tol 1e-8), argmin within {where:.1e} of 0"


def criterion_5():
    r = np.linspace(0.1, 10, 400)
    worst = 0.0
    for d in (2, 3, 4):
        wp = get_entry("hyperbolic_ak").pair({"d": d})
        want = 1 / (4 * r**2) + (d - 1) * (d - 3) / (4 * np.sinh(r) ** 2) + (d - 1) ** 2 / 4
        worst = max(worst, _rel(_w(wp, r), want))
    e = get_entry("hyperbolic_logcoth")
    wp = e.pair()
    grid = e.grid(wp.params)
    want = compile_expr(parse(e.expected_W, "r"), wp.params)(grid)
    log_err = _rel(_w(wp, grid), want)
    ok = worst <= 1e-9 and log_err <= 1e-9
    return ok, f"sinh family error {worst:.2e}, log-coth error {log_err:.2e} (tol 1e-9)"


def criterion_6():
    cases = [("(1+x^2)^((2-d)/2)", -1.0, "no_weight", None),
             ("(1+x^2)^((2-d)/2)", 2.0, "optimal", "divergent"),
             ("(1+x^2)^(2-alpha)", 4.0, "critical", "convergent")]
    got = []
    ok = True
    for h, alpha, want, integral in cases:
        wp = WeightPair(parse(h), parse("(1+x^2)^alpha"), Domain(0, "inf", 3),
                        {"d": 3, "alpha": alpha})
        rep = classify(wp)
        got.append(f"alpha={alpha:g}: {rep.classification}")
        ok &= rep.classification == want
        if integral:
            ok &= rep.optimality_integral is not None and rep.optimality_integral.tag == integral
    return ok, "; ".join(got)


def criterion_7():
    yes = []
    for name in ("jacobi01", "ball_interior", "ball_log", "exterior", "one_plus_x2",
                 "hyperbolic_family", "hyperbolic_logcoth"):
        wp = get_entry(name).pair()
        yes.append((name, wp.h, wp.dom, wp.params))
    for alpha in (-0.5, -1.0, -2.0):
        yes.append((f"(1+x^2)^{alpha:g}", parse("(1+x^2)^alpha"), Domain(0, "inf", 3),
                    {"alpha": alpha}))
    no = [("h=1 on (0,1)", Const(1), Domain(0, 1), {}),
          ("one_plus_x2 V-form alpha=2", parse("(1+x^2)^alpha"), Domain(0, "inf", 3),
           {"alpha": 2.0})]
    wrong = [n for n, h, dom, p in yes if recurrence_test(h, dom, params=p).recurrent != "yes"]
    wrong += [n for n, h, dom, p in no if recurrence_test(h, dom, params=p).recurrent != "no"]
    return not wrong, (f"{len(yes)} recurrent and {len(no)} transient verdicts as expected"
                       if not wrong else f"wrong verdicts: {', '.join(wrong)}")


def criterion_8():
    worst, where = 0.0, ""
    for e in list_entries():
        wp = e.pair()
        W = derive_weight(wp)
        r = ode_residual(ground_state(wp.h, wp.V), wp.V, W, wp.dom.d, e.grid(wp.params),
                         wp.params)
        if r >= worst:
            worst, where = r, e.name
    return worst <= 1e-8, f"max residual {worst:.2e} ({where}) over {len(list_entries())} entries (tol 1e-8)"


def criterion_9():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(100):
        phi, psi = random_positive_expr(rng), random_positive_expr(rng)
        d = float(rng.choice([1, 2, 3, 4.5]))
        worst = max(worst, product_rule_residual(phi, psi, d, SAFE_GRID),
                    dimension_shift_residual(phi, psi, d, SAFE_GRID))
    return worst <= 1e-9, f"max residual {worst:.2e} over 100 random pairs (tol 1e-9)"


def criterion_10():
    wp = WeightPair(parse("x^(2-d)"), Const(1), Domain(0, "inf", 3), {"d": 3})
    W = derive_weight(wp)
    truncs = [(1e-2, 1e2, 500), (1e-3, 1e3, 2000)]
    rep = verify_inequality(wp, W, truncs)
    q = [t[-1] for t in rep.quotients]
    bad = verify_inequality(wp, Const(2) * W, truncs)
    q2 = bad.quotients[-1][-1]
    lower = rep.verdict == "PASS"
    upper = q[-1] <= 1.2
    mutation = bad.verdict == "FAIL" and q2 < 1
    detail = (f"quotients {q[0]:.6f} -> {q[-1]:.6f} (>= 1-1e-6, non-increasing: {lower}); "
              f"finest <= 1.2: {upper}; 2W quotient {q2:.4f} (FAIL detected: {mutation})")
    return lower and upper and mutation, detail


def criterion_11():
    x = np.linspace(0.1, 5, 400)
    worst = 0.0
    for d, delta, gamma in ((3, 1, 0.5), (4, 0, 1)):
        wp = get_entry("gaussian").pair({"d": d, "delta": delta, "gamma": gamma})
        want = ((d - delta - 2) / 2) ** 2 / x**2 - (d - delta) * gamma + gamma**2 * x**2
        worst = max(worst, _rel(_w(wp, x), want))
    return worst <= 1e-9, f"max relative error {worst:.2e} (tol 1e-9)"


def criterion_12():
    worst, verdicts = 0.0, set()
    for d in (3, 4, 5, 7):
        for m in (0, 0.5, 1):
            if d - 2 * m - 2 < 0:
                continue
            for alpha in (0.5, 1, 3):
                for beta in (0.25, 1, 2):
                    q = power_binomial_quadratic(d, m, alpha, beta)
                    verdicts.add(quadratic_positivity(q))
                    worst = max(worst, abs(q(0.0) - ((d - 2 * m - 2) / 2) ** 2),
                                abs(q(1.0) - ((alpha * beta + d - 2 * m - 2) / 2) ** 2))
    hand = QuadraticForm(1.0, -1.0, 0.2)
    assert 0 < hand.axis < 1 and hand.discriminant > 0
    hand_verdict = quadratic_positivity(hand)
    ok = verdicts == {"positive"} and worst <= 1e-12 and hand_verdict == "not_positive"
    return ok, (f"family verdicts {sorted(verdicts)}, endpoint error {worst:.1e} (tol 1e-12); "
                f"hand-built case {hand_verdict}")


def criterion_13():
    prob = SturmLiouvilleProblem(1, 1, 0, 1, 2000)
    errs = [abs(eigenvalue(prob, k) / (k * k * math.pi**2) - 1) for k in (1, 2, 3)]
    return max(errs) <= 1e-4, "relative errors " + ", ".join(f"{e:.2e}" for e in errs) + " (tol 1e-4)"


CRITERIA = [globals()[f"criterion_{i}"] for i in range(1, 14)]


def _line(i, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {i:2d}: {detail}"


@pytest.mark.parametrize("i", range(1, 14))
def test_criterion(i):
    ok, detail = CRITERIA[i - 1]()
    line = _line(i, ok, detail)
    RESULTS[i] = line
    print(line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for i, check in enumerate(CRITERIA, 1):
        ok, detail = check()
        failed += not ok
        print(_line(i, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
