"""Ground states on hyperbolic space.

With h = r and V = sinh(r)^(d-1) the weight is
1/(4 r^2) + (d-1)(d-3)/(4 sinh^2 r) + (d-1)^2/4.  Its ground state
sqrt(h/V) solves the Bessel-pair ODE exactly; shooting from that data
stays positive, while quadrupling the weight makes the solution
oscillate.  The last column prints the bottom of the spectrum bound.

Run:  python3 demos/hyperbolic_ground_state.py
"""
import numpy as np

from hardyforge import Domain, WeightPair, derive_weight, spectral_lower_bounds
from hardyforge.besselpair import OdeProblem, ground_state, ode_residual, shoot
from hardyforge.expr import Const, compile_expr, differentiate, parse

for d in (2, 3, 4):
    wp = WeightPair(parse("r", "r"), parse("sinh(r)^(d-1)", "r"), Domain(0, "inf", 1),
                    {"d": d})
    W = derive_weight(wp)
    g = ground_state(wp.h, wp.V)
    grid = np.geomspace(0.05, 20, 200)
    res = ode_residual(g, wp.V, W, 1, grid, wp.params)

    x0 = 1.0
    u0 = float(compile_expr(g, wp.params)(np.array([x0]))[0])
    du0 = float(compile_expr(differentiate(g), wp.params)(np.array([x0]))[0])
    ok = shoot(OdeProblem(wp.V, W, 1, 0.1, 6, u0, du0, x0, params=wp.params))
    over = shoot(OdeProblem(wp.V, Const(4) * W, 1, 0.1, 6, u0, du0, x0, params=wp.params))
    lam = spectral_lower_bounds(W, Const(1), wp.dom, params=wp.params).lam_prime
    print(f"d={d}: residual {res:.1e}; shooting positive={ok.positive}; "
          f"4W sign changes={len(over.sign_changes)}; inf W = {lam:.4f} "
          f"(limit (d-1)^2/4 = {(d - 1) ** 2 / 4:.4f})")
