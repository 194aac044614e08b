"""
hardyforge
==========

Hardy-type inequalities from pairs of radial weights.  For weights ``h``
and ``V`` the function ``W = J^d(h) - J^d(V)`` is a Hardy weight for the
energy ``int |grad u|^2 V``; recurrence of the form with weight ``h``
makes it critical, and divergence of ``int h W`` makes it optimal.

Modules
-------
expr        expression trees: parse, render, differentiate, compile
calculus    the radial operator J^d and its identities
feller      endpoint integrals and recurrence of radial forms
hardy       weights, positivity, classification, spectral bounds
spectral    discrete Rayleigh quotients on truncated intervals
besselpair  ground states and the Bessel-pair ODE
catalog     worked examples with expected closed forms
cli         the ``hardy-forge`` command
"""

__version__ = "0.1.0"

from .expr import (Expr, ExprError, ParseError, DomainError, UnboundParameterError,
                   parse, render, compile_expr, evaluate, differentiate, simplify)
from .calculus import (j_op, i_radial, log_derivative, product_rule_residual,
                       dimension_shift_residual)
from .feller import (Domain, FellerConfig, IntegralVerdict, RecurrenceVerdict,
                     classify_endpoint_integral, recurrence_test)
from .hardy import (WeightPair, HardyReport, QuadraticForm, derive_weight, positivity_scan,
                    optimality_test, boundary_density, spectral_lower_bounds,
                    quadratic_positivity, power_binomial_quadratic, classify)
from .spectral import (SturmLiouvilleProblem, assemble, min_rayleigh, hardy_problem,
                       verify_inequality)
from .besselpair import OdeProblem, ground_state, ode_residual, shoot
from .catalog import list_entries, get_entry, run_entry, run_all

__all__ = [
    "Expr", "ExprError", "ParseError", "DomainError", "UnboundParameterError",
    "parse", "render", "compile_expr", "evaluate", "differentiate", "simplify",
    "j_op", "i_radial", "log_derivative", "product_rule_residual",
    "dimension_shift_residual",
    "Domain", "FellerConfig", "IntegralVerdict", "RecurrenceVerdict",
    "classify_endpoint_integral", "recurrence_test",
    "WeightPair", "HardyReport", "QuadraticForm", "derive_weight", "positivity_scan",
    "optimality_test", "boundary_density", "spectral_lower_bounds",
    "quadratic_positivity", "power_binomial_quadratic", "classify",
    "SturmLiouvilleProblem", "assemble", "min_rayleigh", "hardy_problem",
    "verify_inequality",
    "OdeProblem", "ground_state", "ode_residual", "shoot",
    "list_entries", "get_entry", "run_entry", "run_all",
]
