"""The classical Hardy inequality in three dimensions, end to end.

Starting from the pair h = x^(2-d), V = 1 we derive the weight, check that
it is an optimal Hardy weight, and then watch the discrete Rayleigh
quotient creep down toward the sharp constant 1 as the truncated interval
grows.  Doubling the weight breaks the inequality, and the quotient says so.

Run:  python3 demos/classical_hardy.py
"""
import math

from hardyforge import Domain, WeightPair, classify, derive_weight
from hardyforge.expr import Const, evaluate, parse
from hardyforge.spectral import verify_inequality

wp = WeightPair(parse("x^(2-d)"), Const(1), Domain(0, "inf", 3), {"d": 3})
W = derive_weight(wp)
for x in (0.01, 1.0, 100.0):
    print(f"W({x:g}) * x^2 = {evaluate(W, x, wp.params) * x * x:.15f}")

report = classify(wp)
print("classification:", report.classification)
print("  h-form recurrent:", report.recurrence.recurrent)
print("  integral of h W:", report.optimality_integral.describe())

print("\nRayleigh quotient int u'^2 x^2 / int u^2 W x^2 on growing truncations")
print(f"{'interval':>20s} {'n':>6s} {'quotient':>10s} {'continuum':>10s}")
truncs = [(10.0**-k, 10.0**k, 500 * k) for k in (1, 2, 3, 4, 6)]
rep = verify_inequality(wp, W, truncs)
for a, b, n, q in rep.quotients:
    exact = 1 + (2 * math.pi / math.log(b / a)) ** 2
    print(f"[{a:.0e}, {b:.0e}]".rjust(20), f"{n:6d} {q:10.6f} {exact:10.6f}")
print("verdict:", rep.verdict, "(the constant 1 is approached only logarithmically)")

bad = verify_inequality(wp, Const(2) * W, truncs[-2:])
print("\nwith 2W instead of W the finest quotient is "
      f"{bad.quotients[-1][-1]:.4f}: verdict {bad.verdict}")
