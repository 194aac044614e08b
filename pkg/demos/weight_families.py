"""How the Hardy weight of (1+x^2)^alpha changes with alpha.

For h = (1+x^2)^((2-d)/2) and V = (1+x^2)^alpha in dimension 3 there is no
Hardy weight at all once the V-form is recurrent (alpha <= -1/2).  Above
that threshold the derived weight stays nonnegative and is optimal, since
h W decays like 1/x^(d-1) and its integral diverges logarithmically.
The alternative pair h = (1+x^2)^(2-alpha) only has a recurrent h-form
for alpha >= 5/2; past that point its weight 2d(alpha-1)/(1+x^2) is
critical but not optimal.

Run:  python3 demos/weight_families.py
"""
from hardyforge import Domain, WeightPair, classify

dom = Domain(0, "inf", 3)
print(f"{'alpha':>6s}  {'h = (1+x^2)^(-1/2)':>20s}  {'h = (1+x^2)^(2-alpha)':>22s}")
for alpha in (-1.0, -0.5, 0.0, 1.0, 2.0, 2.5, 3.0, 4.0):
    params = {"d": 3, "alpha": alpha}
    first = classify(WeightPair("(1+x^2)^((2-d)/2)", "(1+x^2)^alpha", dom, params))
    second = classify(WeightPair("(1+x^2)^(2-alpha)", "(1+x^2)^alpha", dom, params))
    print(f"{alpha:6.2f}  {first.classification:>20s}  {second.classification:>22s}")

print("\n'indeterminate' in the second column: the h-form is transient there,")
print("so the chain stops before it can certify criticality.")
