"""
Discrete Rayleigh quotients
===========================

The inequality ``int u^2 M dt <= int u'^2 P dt`` on a truncated interval
``[a, b]`` with Dirichlet ends is tested by computing the smallest
eigenvalue of the pencil ``K u = lam M u`` where ``K`` is the
three-point finite-difference stiffness matrix of ``-(P u')'`` and ``M``
the lumped (diagonal) mass matrix of ``M``.  The inequality holds on the
truncation exactly when ``lam >= 1``.

``K`` is symmetric positive definite and tridiagonal and ``M`` is
diagonal and nonnegative, so the number of eigenvalues below ``sigma``
equals the number of negative pivots in the ``LDL^T`` factorisation of
``K - sigma M`` (Sylvester's law of inertia).  The smallest eigenvalue
is found by bisection on that count; its eigenvector by inverse
iteration.

Intervals spanning four or more decades are discretised uniformly in
``y = log(t - origin)`` instead of ``t``; the quotient is invariant, only
the coefficients pick up the Jacobian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from .expr import Const, Expr, ExprError, Var, as_expr, compile_expr, simplify

__all__ = [
    "SturmLiouvilleProblem", "Pencil", "SpectralResult", "VerificationReport",
    "assemble", "sturm_count", "eigenvalue", "min_rayleigh", "hardy_problem",
    "verify_inequality", "PASS_TOLERANCE",
]

PASS_TOLERANCE = 1e-6
MONOTONE_TOLERANCE = 1e-8


@dataclass(frozen=True)
class SturmLiouvilleProblem:
    """``-(p u')' = lam m u`` on ``[a, b]`` with ``u(a) = u(b) = 0``.

    ``n`` is the number of interior nodes.  ``log_map`` switches to the
    variable ``y = log(t - origin)``; ``None`` picks it automatically
    when ``(b - origin)/(a - origin) >= 1e4``.  ``potential`` adds
    ``int q u^2`` to the stiffness side (used to move a negative part
    of a weight across the inequality).
    """

    p: Expr
    m: Expr
    a: float
    b: float
    n: int
    params: dict = field(default_factory=dict)
    log_map: bool | None = None
    origin: float = 0.0
    potential: Expr | None = None

    def __post_init__(self):
        object.__setattr__(self, "p", as_expr(self.p))
        object.__setattr__(self, "m", as_expr(self.m))
        if self.potential is not None:
            object.__setattr__(self, "potential", as_expr(self.potential))
        if not self.a < self.b:
            raise ValueError("need a < b")
        if self.n < 16:
            raise ValueError("need at least 16 interior nodes")

    @property
    def mapped(self) -> bool:
        if self.log_map is not None:
            return self.log_map
        lo = self.a - self.origin
        return lo > 0 and (self.b - self.origin) / lo >= 1e4


@dataclass
class Pencil:
    diag: np.ndarray
    off: np.ndarray
    mass: np.ndarray
    nodes: np.ndarray


def assemble(problem: SturmLiouvilleProblem) -> Pencil:
    """Finite-difference stiffness (tridiagonal) and lumped mass (diagonal).

    Stiffness uses midpoint values of ``p``; mass uses nodal values of ``m``.
    """
    pr = problem
    fp = compile_expr(pr.p, pr.params)
    fm = compile_expr(pr.m, pr.params)
    fq = compile_expr(pr.potential, pr.params) if pr.potential is not None else None
    n = pr.n
    if pr.mapped:
        o = pr.origin
        ya, yb = math.log(pr.a - o), math.log(pr.b - o)
        hy = (yb - ya) / (n + 1)
        y_nodes = ya + hy * np.arange(1, n + 1)
        y_mid = ya + hy * (np.arange(n + 1) + 0.5)
        t_nodes = o + np.exp(y_nodes)
        t_mid = o + np.exp(y_mid)
        # dt = e^y dy, u_t = u_y e^-y
        p_mid = fp(t_mid) * np.exp(-y_mid)
        jac = np.exp(y_nodes)
    else:
        hy = (pr.b - pr.a) / (n + 1)
        t_nodes = pr.a + hy * np.arange(1, n + 1)
        t_mid = pr.a + hy * (np.arange(n + 1) + 0.5)
        p_mid = fp(t_mid)
        jac = np.ones(n)
    m_nodes = fm(t_nodes) * jac
    if np.any(p_mid <= 0):
        raise ValueError("stiffness weight must be positive on [a, b]")
    if np.any(m_nodes < 0) or not np.any(m_nodes > 0):
        raise ValueError("mass weight must be nonnegative and not identically zero")
    diag = (p_mid[:-1] + p_mid[1:]) / hy
    if fq is not None:
        diag = diag + hy * fq(t_nodes) * jac
    off = -p_mid[1:-1] / hy
    return Pencil(diag, off, hy * m_nodes, t_nodes)


def sturm_count(pencil: Pencil, sigma: float) -> int:
    """Number of eigenvalues of the pencil strictly below ``sigma``."""
    d = pencil.diag - sigma * pencil.mass
    off2 = pencil.off ** 2
    tiny = np.finfo(float).tiny ** 0.5
    count = 0
    piv = float(d[0])
    for i in range(len(d)):
        if i:
            piv = float(d[i]) - float(off2[i - 1]) / piv
        if piv == 0.0:
            piv = -tiny
        if piv < 0:
            count += 1
    return count


@dataclass
class SpectralResult:
    min_eigenvalue: float
    eigenvector: np.ndarray
    grid: np.ndarray
    history: list

    def to_dict(self):
        return {"min_eigenvalue": self.min_eigenvalue,
                "history": [[int(n), float(v)] for n, v in self.history]}


def _bisect(pencil: Pencil, rtol: float, k: int = 1) -> float:
    n = len(pencil.diag)
    v = np.sin(np.pi * np.arange(1, n + 1) / (n + 1))
    kv = pencil.diag * v
    kv[:-1] += pencil.off * v[1:]
    kv[1:] += pencil.off * v[:-1]
    mv = pencil.mass @ (v * v)
    hi = float(v @ kv / mv) if mv > 0 else 1.0
    while sturm_count(pencil, hi) < k:
        hi *= 2
    lo = 0.0
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if sturm_count(pencil, mid) >= k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _inverse_iteration(pencil: Pencil, lam: float, iters: int = 4, retries: int = 5):
    n = len(pencil.diag)
    rng = np.random.default_rng(0)
    v = np.abs(rng.standard_normal(n)) + 1.0
    shift = lam * (1 - 1e-9)
    for _ in range(retries):
        ab = np.zeros((3, n))
        ab[0, 1:] = pencil.off
        ab[1] = pencil.diag - shift * pencil.mass
        ab[2, :-1] = pencil.off
        try:
            for _ in range(iters):
                w = solve_banded((1, 1), ab, pencil.mass * v)
                if not np.all(np.isfinite(w)):
                    raise LinAlgError("non-finite iterate")
                v = w / np.sqrt(np.sum(pencil.mass * w * w))
            break
        except (LinAlgError, ValueError):
            shift = lam * (1 - 1e-6 * (1 + rng.random()))
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return v


def eigenvalue(problem: SturmLiouvilleProblem, k: int = 1, rtol: float = 1e-10) -> float:
    """The ``k``-th smallest eigenvalue (``k = 1`` is the minimum)."""
    pencil = assemble(problem)
    if not 1 <= k <= len(pencil.diag):
        raise ValueError("k out of range")
    return _bisect(pencil, rtol, k)


def min_rayleigh(problem: SturmLiouvilleProblem, rtol: float = 1e-10,
                 refine: int = 0) -> SpectralResult:
    """Smallest eigenvalue of the discretised problem.

    With ``refine > 0`` the grid is doubled that many times and every
    level is recorded in ``history``; the returned eigenpair belongs to
    the finest level.  The eigenvector is normalised to unit mass norm.
    """
    history = []
    prob = problem
    for level in range(refine + 1):
        if level:
            prob = SturmLiouvilleProblem(prob.p, prob.m, prob.a, prob.b, 2 * prob.n + 1,
                                         prob.params, prob.mapped, prob.origin,
                                         prob.potential)
        pencil = assemble(prob)
        lam = _bisect(pencil, rtol)
        history.append((prob.n, lam))
    vec = _inverse_iteration(pencil, lam)
    return SpectralResult(lam, vec, pencil.nodes, history)


def hardy_problem(h, V, W, d, a, b, n, params=None, mass="wv", log_map=None,
                  origin=0.0, shift=0.0) -> SturmLiouvilleProblem:
    """The quotient ``int u'^2 V t^(d-1) / int u^2 M t^(d-1)`` on ``[a, b]``.

    ``mass`` selects ``M``: ``"wv"`` for ``W V``, ``"v"`` for ``V`` and
    ``"lebesgue"`` for ``1``.  With ``shift = s > 0`` the problem becomes
    ``(int u'^2 V + s int u^2 V) / int u^2 (W + s) V`` (radial measure
    implied), which is what a sign-changing ``W`` needs.
    """
    V, W = as_expr(V), as_expr(W)
    vol = Const(1.0) if float(d) == 1.0 else Var() ** Const(float(d) - 1)
    p = simplify(V * vol)
    mass_expr = {"wv": W * V, "v": V, "lebesgue": Const(1.0)}[mass]
    potential = None
    if shift:
        if mass != "wv":
            raise ValueError("shift only makes sense with the W V mass")
        mass_expr = (W + Const(shift)) * V
        potential = simplify(Const(shift) * V * vol)
    m = simplify(mass_expr * vol)
    return SturmLiouvilleProblem(p, m, a, b, n, dict(params or {}), log_map, origin,
                                 potential)


@dataclass
class VerificationReport:
    quotients: list
    passed: bool
    monotone: bool
    vacuous: bool = False
    inconclusive: bool = False
    note: str = ""

    @property
    def verdict(self) -> str:
        if self.inconclusive:
            return "inconclusive"
        return "PASS" if self.passed else "FAIL"

    def to_dict(self):
        return {"verdict": self.verdict, "passed": self.passed,
                "monotone": self.monotone, "vacuous": self.vacuous,
                "note": self.note,
                "quotients": [{"a": a, "b": b, "n": n, "quotient": q}
                              for a, b, n, q in self.quotients]}


def verify_inequality(wp, W, truncations, shift: float = 0.0,
                      rtol: float = 1e-10) -> VerificationReport:
    """Check ``int u^2 W V <= int u'^2 V`` on a sequence of truncations.

    Parameters
    ----------
    wp : WeightPair
    W : Expr
        The weight to test (usually ``derive_weight(wp)``).
    truncations : sequence of ``(a, b, n)``
        Nested intervals with grid sizes, coarsest first.
    shift : float
        See :func:`hardy_problem`.

    PASS means every quotient is at least ``1 - 1e-6`` and the sequence
    does not increase (up to ``1e-8`` relative).  A weight that vanishes
    on every truncation passes vacuously with quotient ``inf``.
    """
    W = as_expr(W)
    d = wp.dom.d
    origin = wp.dom.l if math.isfinite(wp.dom.l) else 0.0
    quotients = []
    fW = compile_expr(W, wp.params)
    try:
        for a, b, n in truncations:
            probe = fW(np.linspace(a, b, 257))
            if not shift and np.all(probe == 0):
                quotients.append((a, b, n, math.inf))
                continue
            prob = hardy_problem(wp.h, wp.V, W, d, a, b, n, wp.params, origin=origin,
                                 shift=shift)
            quotients.append((a, b, n, min_rayleigh(prob, rtol).min_eigenvalue))
    except (ExprError, ValueError) as exc:
        return VerificationReport(quotients, False, False, inconclusive=True,
                                  note=str(exc))
    qs = [q for *_, q in quotients]
    if all(math.isinf(q) for q in qs):
        return VerificationReport(quotients, True, True, vacuous=True,
                                  note="weight vanishes; inequality is vacuous")
    passed_each = all(q >= 1 - PASS_TOLERANCE for q in qs)
    monotone = all(q2 <= q1 * (1 + MONOTONE_TOLERANCE) for q1, q2 in zip(qs, qs[1:]))
    return VerificationReport(quotients, passed_each and monotone, monotone)
