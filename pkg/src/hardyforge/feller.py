"""
Feller's recurrence test for radial energy forms
================================================

The form ``int |grad u|^2 h(|x|) dx`` on the annulus ``{l < |x| < r}`` is
recurrent when the scale function

    S(x) = int_c^x dt / (h(t) t^(d-1))

tends to ``-inf`` as ``x -> l`` and to ``+inf`` as ``x -> r``.

There is no closed form for these limits in general, so each endpoint
integral is classified numerically.  Starting from the base point ``c``
we walk a geometric ladder of shells toward the endpoint (the distance
to a finite endpoint shrinks by ``ladder_factor`` per shell, the
magnitude grows by ``ladder_factor`` toward an infinite one) and
integrate each shell with composite Simpson plus Richardson acceptance
in the log-distance variable.  The sequence of shell increments is then
read off:

* geometric decay (ratio below ``tail_decay_ratio``) means convergence,
  and the geometric tail is added to the partial sum;
* geometric growth means a power-type divergence;
* flat increments mean a logarithmic divergence;
* increments decaying like a power of ``log(distance)`` are fitted on a
  log-log scale against the log-distance; an exponent at most one means
  an iterated-log divergence (``1/(x log x)``), an exponent well above
  one means convergence.

Anything in between is reported as ``Indeterminate``; the test never
guesses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .expr import (DomainError, Expr, ExprError, Var, as_expr, compile_expr, simplify,
                   substitute)

__all__ = [
    "Domain", "FellerConfig", "IntegralVerdict", "RecurrenceVerdict",
    "scale_integrand", "classify_endpoint_integral", "recurrence_test",
    "simpson", "parse_endpoint",
]

Endpoint = Literal["left", "right"]


def parse_endpoint(text) -> float:
    """``'inf'``, ``'-inf'`` or a number."""
    if isinstance(text, (int, float)):
        return float(text)
    t = text.strip().lower().replace("−", "-")
    if t in ("inf", "+inf", "infinity", "oo"):
        return math.inf
    if t in ("-inf", "-infinity", "-oo"):
        return -math.inf
    return float(t)


@dataclass(frozen=True)
class Domain:
    """Open interval ``(l, r)`` of the radial variable, in dimension ``d``."""

    l: float
    r: float
    d: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "l", parse_endpoint(self.l))
        object.__setattr__(self, "r", parse_endpoint(self.r))
        object.__setattr__(self, "d", float(self.d))
        if not self.l < self.r:
            raise ValueError(f"empty interval ({self.l}, {self.r})")
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.d > 1 and self.l < 0:
            raise ValueError("radial domains with d > 1 need l >= 0")

    @property
    def finite(self) -> bool:
        return math.isfinite(self.l) and math.isfinite(self.r)

    def base_point(self) -> float:
        if math.isfinite(self.r):
            if math.isfinite(self.l):
                return 0.5 * (self.l + self.r)
            return min(-1.0, self.r - 1.0)
        if math.isfinite(self.l):
            return max(1.0, self.l + 1.0)
        return 0.0

    def contains(self, x) -> bool:
        return self.l < x < self.r


@dataclass(frozen=True)
class FellerConfig:
    base_point: float | None = None
    ladder_factor: float = 4.0
    shells: int = 24
    tolerance: float = 1e-10
    divergence_threshold: float = 1e6
    tail_decay_ratio: float = 0.9

    def __post_init__(self):
        if self.ladder_factor <= 1:
            raise ValueError("ladder_factor must exceed 1")
        if self.shells < 6:
            raise ValueError("need at least 6 shells")
        if not 0 < self.tail_decay_ratio < 1:
            raise ValueError("tail_decay_ratio must lie in (0, 1)")


@dataclass
class IntegralVerdict:
    """Outcome of an endpoint (or whole-interval) integral classification.

    ``tag`` is ``"convergent"``, ``"divergent"`` or ``"indeterminate"``.
    For convergent integrals ``value`` holds the extrapolated integral and
    ``tail`` the extrapolated remainder beyond the last shell.  For
    divergent ones ``rate`` is ``"power"`` (with ``exponent``, the slope of
    log-increment against log-scale), ``"log"`` or ``"unclassified"``.
    ``evidence`` lists ``(shell endpoint, partial integral from c)``.
    """

    tag: str
    value: float | None = None
    tail: float | None = None
    rate: str | None = None
    exponent: float | None = None
    evidence: list = field(default_factory=list)
    note: str = ""

    @property
    def convergent(self) -> bool:
        return self.tag == "convergent"

    @property
    def divergent(self) -> bool:
        return self.tag == "divergent"

    def describe(self) -> str:
        if self.tag == "convergent":
            return f"Convergent({self.value:.6g})"
        if self.tag == "divergent":
            if self.rate == "power":
                return f"Divergent(Power({self.exponent:.3g}))"
            return f"Divergent({self.rate.capitalize()})"
        return "Indeterminate"

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "value": self.value,
            "tail": self.tail,
            "rate": self.rate,
            "exponent": self.exponent,
            "note": self.note,
            "evidence": [[float(a), float(b)] for a, b in self.evidence],
        }


@dataclass
class RecurrenceVerdict:
    left: IntegralVerdict
    right: IntegralVerdict

    @property
    def recurrent(self) -> str:
        if self.left.divergent and self.right.divergent:
            return "yes"
        if self.left.convergent or self.right.convergent:
            return "no"
        return "indeterminate"

    def to_dict(self) -> dict:
        return {"recurrent": self.recurrent, "left": self.left.to_dict(),
                "right": self.right.to_dict()}


def scale_integrand(h, d) -> Expr:
    """``1/(h(t) t^(d-1))``; just ``1/h`` when ``d == 1``."""
    h = as_expr(h)
    if isinstance(d, (int, float)) and float(d) == 1.0:
        return simplify(1 / h)
    d = as_expr(d)
    return simplify(1 / (h * Var() ** (d - 1)))


def simpson(f, a: float, b: float, tol: float = 1e-10, n0: int = 16,
            max_panels: int = 1 << 18):
    """Composite Simpson on ``[a, b]``, doubling the panel count until the
    Richardson error estimate ``|S_2n - S_n|/15`` is below
    ``tol * max(|S_2n|, tiny)``.

    Returns ``(value, converged)``.  ``f`` takes and returns numpy arrays.
    """
    n = n0
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    s_old = h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())
    while True:
        n *= 2
        h = (b - a) / n
        mid = f(a + h * np.arange(1, n, 2))
        y_new = np.empty(n + 1)
        y_new[0::2] = y
        y_new[1::2] = mid
        y = y_new
        s_new = h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())
        err = abs(s_new - s_old) / 15
        if not math.isfinite(s_new):
            return s_new, False
        if err <= tol * max(abs(s_new), 1e-300):
            return s_new + (s_new - s_old) / 15, True
        if n >= max_panels:
            return s_new, False
        s_old = s_new


def _lstsq(xs, ys):
    """Slope, intercept and residual sum of squares of a line fit."""
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    A = np.vstack([xs, np.ones_like(xs)]).T
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    rss = float(np.sum((A @ coef - ys) ** 2))
    return float(coef[0]), float(coef[1]), rss


def _ladder(endpoint_value, sign, c, cfg):
    """Yield ``(p_k, p_{k+1}, scale, kind)`` for each shell."""
    F = cfg.ladder_factor
    if math.isfinite(endpoint_value):
        s0 = abs(c - endpoint_value)
        # deeper shells would not be resolvable in double precision
        floor = 1e-11 * max(1.0, abs(endpoint_value)) if endpoint_value != 0 else 1e-290
        s = s0
        for _ in range(cfg.shells):
            s_next = s / F
            if s_next < floor:
                return
            yield s, s_next, "finite"
            s = s_next
    else:
        M = max(1.0, abs(c))
        yield c, sign * M * F, "first"
        m = M * F
        for _ in range(cfg.shells - 1):
            if m * F > 1e300:
                return
            yield m, m * F, "infinite"
            m *= F


def classify_endpoint_integral(f, endpoint: Endpoint, dom: Domain,
                               cfg: FellerConfig | None = None,
                               params=None) -> IntegralVerdict:
    """Classify ``lim int_c^x f`` as ``x`` tends to the chosen endpoint.

    Parameters
    ----------
    f : Expr or str
        Integrand; only needs to be evaluable strictly inside ``dom``.
    endpoint : {"left", "right"}
    dom : Domain
    cfg : FellerConfig, optional
    params : mapping, optional
        Parameter bindings for ``f``.
    """
    cfg = cfg or FellerConfig()
    c = cfg.base_point if cfg.base_point is not None else dom.base_point()
    if not dom.contains(c):
        raise ValueError(f"base point {c} not inside ({dom.l}, {dom.r})")
    if endpoint not in ("left", "right"):
        raise ValueError(f"endpoint must be 'left' or 'right', got {endpoint!r}")
    fn = compile_expr(as_expr(f), params)
    sign = -1.0 if endpoint == "left" else 1.0
    e = dom.l if endpoint == "left" else dom.r

    partial = 0.0
    incs, scales, evidence = [], [], []
    for a, b, kind in _ladder(e, sign, c, cfg):
        try:
            if kind == "finite":
                # x = e - sign*s, s = exp(y); dx = -sign*s dy, integrate outward->inward
                def g(y):
                    s = np.exp(y)
                    return fn(e - sign * s) * s
                # e - s carries an absolute rounding error of eps*|e|, i.e. a
                # relative staircase of eps*|e|/s that no quadrature can beat
                tol = max(cfg.tolerance, 1e3 * np.finfo(float).eps * abs(e) / b)
                val, ok = simpson(g, math.log(b), math.log(a), tol)
                inc = sign * val
                point, scale = e - sign * b, b
            elif kind == "first":
                val, ok = simpson(fn, min(a, b), max(a, b), cfg.tolerance)
                inc = sign * val
                point, scale = b, abs(b)
            else:
                def g(y):
                    m = np.exp(y)
                    return fn(sign * m) * m
                val, ok = simpson(g, math.log(a), math.log(b), cfg.tolerance)
                inc = sign * val
                point, scale = sign * b, b
        except (DomainError, ExprError, FloatingPointError) as exc:
            return _trend_or_give_up(incs, scales, evidence, partial, cfg,
                                     f"integrand failed inside shell: {exc}",
                                     overflow=isinstance(exc, DomainError))
        if not ok or not math.isfinite(inc):
            return _trend_or_give_up(incs, scales, evidence, partial, cfg,
                                     "quadrature did not converge on a shell")
        partial += inc
        incs.append(abs(inc))
        scales.append(scale)
        evidence.append((point, partial))
        if (abs(partial) >= cfg.divergence_threshold and len(incs) >= 3
                and incs[-1] >= incs[-2] >= incs[-3]):
            slope, _, _ = _lstsq(np.log(scales[-3:]), np.log(incs[-3:]))
            return IntegralVerdict("divergent", rate="power", exponent=slope,
                                   evidence=evidence,
                                   note="partial integral exceeded divergence threshold")
    return _read_tail(incs, scales, evidence, partial, math.isfinite(e), cfg)


def _trend_or_give_up(incs, scales, evidence, partial, cfg, why, overflow=False):
    """Ladder broke off early.  Accept only an unambiguous geometric trend
    over the last three increments; otherwise report indeterminate.

    An integrand that stops being representable right after the partial
    integral passed the divergence threshold on growing increments is
    read as divergent.
    """
    if (overflow and len(incs) >= 2 and abs(partial) >= cfg.divergence_threshold
            and incs[-1] >= incs[-2] > 0):
        slope, _, _ = _lstsq(np.log(scales[-2:]), np.log(incs[-2:]))
        return IntegralVerdict("divergent", rate="power", exponent=slope,
                               evidence=evidence,
                               note=f"{why}; partial integral already past the "
                                    "divergence threshold and growing")
    if len(incs) >= 4 and all(v > 0 for v in incs[-3:]):
        r1, r2 = incs[-2] / incs[-3], incs[-1] / incs[-2]
        note = f"{why}; decided on the trend of the last 3 shells"
        if r1 <= cfg.tail_decay_ratio and r2 <= cfg.tail_decay_ratio:
            rho = max(r1, r2)
            last_sign = math.copysign(1.0, evidence[-1][1] - evidence[-2][1])
            tail = last_sign * incs[-1] * rho / (1 - rho)
            return IntegralVerdict("convergent", value=partial + tail, tail=tail,
                                   evidence=evidence, note=note)
        if r1 >= 1 / cfg.tail_decay_ratio and r2 >= 1 / cfg.tail_decay_ratio:
            slope, _, _ = _lstsq(np.log(scales[-3:]), np.log(incs[-3:]))
            return IntegralVerdict("divergent", rate="power", exponent=slope,
                                   evidence=evidence, note=note)
    return IntegralVerdict("indeterminate", evidence=evidence, note=why)


def _read_tail(incs, scales, evidence, partial, finite_end, cfg):
    n = len(incs)
    if n < 6:
        return IntegralVerdict("indeterminate", evidence=evidence,
                               note=f"only {n} resolvable shells")
    k0 = max(1, n // 2)
    k0 = min(k0, n - 6) if n - 6 >= 1 else 1
    I = np.array(incs[k0:])
    s = np.array(scales[k0:])
    last_sign = math.copysign(1.0, evidence[-1][1] - (evidence[-2][1] if n > 1 else 0.0))

    if np.all(I == 0):
        return IntegralVerdict("convergent", value=partial, tail=0.0, evidence=evidence)
    if np.any(I == 0):
        return IntegralVerdict("indeterminate", evidence=evidence,
                               note="integrand vanishes on some shells")

    logI = np.log(I)
    k = np.arange(len(I), dtype=float)
    beta_a, _, rss_a = _lstsq(k, logI)
    rho = math.exp(beta_a)
    sigma, _, _ = _lstsq(np.log(s), logI)

    if rho <= cfg.tail_decay_ratio:
        tail = last_sign * incs[-1] * rho / (1 - rho)
        return IntegralVerdict("convergent", value=partial + tail, tail=tail,
                               evidence=evidence)
    if rho >= 1 / cfg.tail_decay_ratio:
        return IntegralVerdict("divergent", rate="power", exponent=sigma,
                               evidence=evidence)

    # sub-geometric: compare against a power law in the log-distance
    t = np.abs(np.log(s)) if finite_end else np.log(s)
    model_b = bool(np.all(t > 1.0))
    if model_b:
        beta_b, _, rss_b = _lstsq(np.log(t), logI)
        q = -beta_b
    flat = abs(rho - 1.0) <= 0.02

    if not model_b or rss_a <= rss_b:
        if flat:
            return IntegralVerdict("divergent", rate="log", exponent=sigma,
                                   evidence=evidence)
        if rho > 1.0:
            return IntegralVerdict("divergent", rate="power", exponent=sigma,
                                   evidence=evidence)
        return IntegralVerdict("indeterminate", evidence=evidence,
                               note=f"slow geometric decay (ratio {rho:.4f})")
    if abs(q) <= 0.25 and flat:
        return IntegralVerdict("divergent", rate="log", exponent=sigma, evidence=evidence)
    if q <= 1.1:
        return IntegralVerdict("divergent", rate="unclassified", exponent=sigma,
                               evidence=evidence,
                               note=f"increments decay like log-distance^-{q:.3f}")
    if q >= 1.5:
        dt = abs(t[-1] - t[-2])
        tail = last_sign * incs[-1] * t[-1] / (dt * (q - 1))
        return IntegralVerdict("convergent", value=partial + tail, tail=tail,
                               evidence=evidence,
                               note=f"increments decay like log-distance^-{q:.3f}")
    return IntegralVerdict("indeterminate", evidence=evidence,
                           note=f"borderline log-distance exponent {q:.3f}")


def recurrence_test(h, dom: Domain, cfg: FellerConfig | None = None,
                    params=None) -> RecurrenceVerdict:
    """Feller's test for ``int |grad u|^2 h(|x|) dx`` on ``dom``."""
    f = scale_integrand(substitute(as_expr(h), params), dom.d)
    return RecurrenceVerdict(
        left=classify_endpoint_integral(f, "left", dom, cfg, params),
        right=classify_endpoint_integral(f, "right", dom, cfg, params),
    )
