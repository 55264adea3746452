"""Green's kernels of ``P(D) = D^2 + pD + q`` and the univariate extremal values.

The terminal-value problem ``P(d/dt) f = phi`` on ``[0, a]`` with
``f(a) = f'(a) = 0`` is solved by ``f(t) = int_0^a g((tau - t)_+) phi(tau) dtau``.
Operators are classified by their characteristic roots:

* ``DoubleRoot(alpha)``          -- ``(D - alpha)^2``
* ``DistinctReal(alpha, beta)``  -- ``(D - alpha)(D - beta)``, ``alpha < beta``
* ``ComplexPair(alpha, beta)``   -- ``(D - alpha)^2 + beta^2``, roots ``alpha +- i beta``

In all three cases ``g`` is built from ``exp(-root * t)``, so the kernel
satisfies ``g'' - p g' + q g = 0`` with ``g(0) = 0`` and ``g'(0) = 1``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import optimize, special

from .errors import DomainError, InvalidCoefficients, OutOfRange

__all__ = [
    "OperatorSpec",
    "DoubleRoot",
    "DistinctReal",
    "ComplexPair",
    "OperatorClass",
    "ExtremalProfile",
    "classify",
    "as_operator",
    "g_eval",
    "g_prime_eval",
    "G_eval",
    "delta_threshold",
    "t_zero",
    "ext1",
    "ext2",
    "h_tilde",
    "h_tilde_prime",
    "extremal_profile",
]

# below these dimensionless sizes the closed forms of G cancel badly
_SERIES_RADIUS = 1.0
_TAYLOR_SWITCH = 1e-3
_SERIES_TERMS = 32


@dataclass(frozen=True)
class OperatorSpec:
    """Coefficients of ``P(D) = D^2 + p D + q``."""

    p: float
    q: float

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if not (math.isfinite(p) and math.isfinite(q)):
            raise InvalidCoefficients(f"coefficients must be finite, got p={self.p!r}, q={self.q!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class DoubleRoot:
    """``(D - alpha)^2``."""

    alpha: float

    @property
    def p(self) -> float:
        return -2.0 * self.alpha

    @property
    def q(self) -> float:
        return self.alpha * self.alpha

    @property
    def spectral_radius(self) -> float:
        return abs(self.alpha)


@dataclass(frozen=True)
class DistinctReal:
    """``(D - alpha)(D - beta)`` with ``alpha < beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.alpha < self.beta:
            raise InvalidCoefficients(f"need alpha < beta, got {self.alpha}, {self.beta}")

    @property
    def p(self) -> float:
        return -(self.alpha + self.beta)

    @property
    def q(self) -> float:
        return self.alpha * self.beta

    @property
    def spectral_radius(self) -> float:
        return max(abs(self.alpha), abs(self.beta))


@dataclass(frozen=True)
class ComplexPair:
    """``(D - alpha)^2 + beta^2``, characteristic roots ``alpha +- i beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise InvalidCoefficients(f"need beta > 0, got {self.beta}")

    @property
    def p(self) -> float:
        return -2.0 * self.alpha

    @property
    def q(self) -> float:
        return self.alpha * self.alpha + self.beta * self.beta

    @property
    def spectral_radius(self) -> float:
        return math.hypot(self.alpha, self.beta)


OperatorClass = Union[DoubleRoot, DistinctReal, ComplexPair]


def classify(spec: OperatorSpec, tol: float | None = None) -> OperatorClass:
    """Classify ``D^2 + pD + q`` by the sign of the discriminant ``p^2 - 4q``.

    Discriminants within ``tol`` of zero (default ``1e-12 * max(1, p^2, |q|)``)
    are treated as a double root.
    """
    if not isinstance(spec, OperatorSpec):
        spec = OperatorSpec(*spec)
    p, q = spec.p, spec.q
    if tol is None:
        tol = 1e-12 * max(1.0, p * p, abs(q))
    if tol < 0:
        raise InvalidCoefficients("classification tolerance must be non-negative")
    disc = p * p - 4.0 * q
    if abs(disc) <= tol:
        return DoubleRoot(-0.5 * p)
    if disc > 0:
        s = math.sqrt(disc)
        # larger-magnitude root first, the other from the product q
        r1 = 0.5 * (-p - s) if p >= 0 else 0.5 * (-p + s)
        r2 = q / r1
        return DistinctReal(min(r1, r2), max(r1, r2))
    return ComplexPair(-0.5 * p, 0.5 * math.sqrt(-disc))


def as_operator(op) -> OperatorClass:
    """Accept an operator class, an :class:`OperatorSpec` or a ``(p, q)`` pair."""
    if isinstance(op, (DoubleRoot, DistinctReal, ComplexPair)):
        return op
    if isinstance(op, OperatorSpec):
        return classify(op)
    return classify(OperatorSpec(*op))


def _as_times(t):
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError("kernel argument must be non-negative")
    return arr


def _ret(arr, scalar):
    return float(arr) if scalar else arr


def g_eval(op, t):
    """Kernel ``g(t)``; vectorised over ``t >= 0``."""
    op = as_operator(op)
    t = _as_times(t)
    with np.errstate(over="ignore"):
        if isinstance(op, DoubleRoot):
            out = t * np.exp(-op.alpha * t)
        elif isinstance(op, DistinctReal):
            m, h = 0.5 * (op.alpha + op.beta), 0.5 * (op.beta - op.alpha)
            out = np.exp(-m * t) * np.sinh(h * t) / h
        else:
            out = np.exp(-op.alpha * t) * np.sin(op.beta * t) / op.beta
    return _ret(out, t.ndim == 0)


def g_prime_eval(op, t):
    """Derivative ``g'(t)``; ``g'(0) = 1``."""
    op = as_operator(op)
    t = _as_times(t)
    with np.errstate(over="ignore"):
        if isinstance(op, DoubleRoot):
            out = (1.0 - op.alpha * t) * np.exp(-op.alpha * t)
        elif isinstance(op, DistinctReal):
            m, h = 0.5 * (op.alpha + op.beta), 0.5 * (op.beta - op.alpha)
            out = np.exp(-m * t) * (np.cosh(h * t) - m * np.sinh(h * t) / h)
        else:
            a, b = op.alpha, op.beta
            out = np.exp(-a * t) * (np.cos(b * t) - a * np.sin(b * t) / b)
    return _ret(out, t.ndim == 0)


@functools.lru_cache(maxsize=256)
def _series_coefficients(op: OperatorClass) -> np.ndarray:
    # G(t) = sum_{n>=1} s_n t^(n+1) / (n+1)!  with  s_n = p s_{n-1} - q s_{n-2}
    p, q = op.p, op.q
    s_prev, s = 0.0, 1.0
    coeffs = []
    fact = 2.0
    for n in range(1, _SERIES_TERMS + 1):
        coeffs.append(s / fact)
        s_prev, s = s, p * s - q * s_prev
        fact *= n + 2
    return np.array(coeffs)


def _horner(coeffs, x):
    acc = np.zeros_like(x)
    for c in coeffs[::-1]:
        acc = acc * x + c
    return acc


def _theta_moment(j: int, x: np.ndarray) -> np.ndarray:
    """``int_0^1 theta^j exp(-x theta) dtheta``, elementwise."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    series = (x >= -30.0) & (x < 2.0)
    if np.any(series):
        xs = x[series]
        term = np.ones_like(xs)
        acc = term / (j + 1)
        for k in range(1, 140):
            term = term * (-xs) / k
            acc = acc + term / (j + k + 1)
        out[series] = acc
    rec = ~series
    if np.any(rec):
        xr = x[rec]
        with np.errstate(over="ignore"):
            emx = np.exp(-xr)
        val = -np.expm1(-xr) / xr
        for i in range(1, j + 1):
            val = (i * val - emx) / xr
        out[rec] = val
    return out


def _G_closed(op: OperatorClass, t: np.ndarray) -> np.ndarray:
    if isinstance(op, DoubleRoot):
        x = op.alpha * t
        return t * t * (-np.expm1(-x) - x * np.exp(-x)) / (x * x)
    if isinstance(op, DistinctReal):
        a, b = op.alpha, op.beta
        m, h = 0.5 * (a + b), 0.5 * (b - a)
        out = np.empty_like(t)
        near = h * t < _TAYLOR_SWITCH
        far = ~near
        tf = t[far]
        out[far] = tf * (special.exprel(-a * tf) - special.exprel(-b * tf)) / (b - a)
        if np.any(near):
            tn = t[near]
            acc = np.zeros_like(tn)
            for k in range(3):
                acc += h ** (2 * k) * tn ** (2 * k + 2) * _theta_moment(2 * k + 1, m * tn) / math.factorial(2 * k + 1)
            out[near] = acc
        return out
    a, b = op.alpha, op.beta
    out = np.empty_like(t)
    near = b * t < _TAYLOR_SWITCH
    far = ~near
    tf = t[far]
    out[far] = (1.0 - np.exp(-a * tf) * (np.cos(b * tf) + a * np.sin(b * tf) / b)) / (a * a + b * b)
    if np.any(near):
        tn = t[near]
        acc = np.zeros_like(tn)
        for k in range(3):
            acc += (-1) ** k * b ** (2 * k) * tn ** (2 * k + 2) * _theta_moment(2 * k + 1, a * tn) / math.factorial(2 * k + 1)
        out[near] = acc
    return out


def G_eval(op, t):
    """Antiderivative ``G`` of ``g`` with ``G(0) = 0``.

    Small ``rho * t`` (``rho`` the largest root modulus) uses the Taylor
    series generated by the recurrence of the characteristic polynomial;
    otherwise the closed forms are used, with expansions in the root gap
    when the roots nearly coincide.
    """
    op = as_operator(op)
    t = _as_times(t)
    flat = np.atleast_1d(t).astype(float)
    out = np.empty_like(flat)
    small = op.spectral_radius * flat <= _SERIES_RADIUS
    if np.any(small):
        ts = flat[small]
        out[small] = ts * ts * _horner(_series_coefficients(op), ts)
    if np.any(~small):
        with np.errstate(over="ignore"):
            out[~small] = _G_closed(op, flat[~small])
    return _ret(out.reshape(t.shape), t.ndim == 0)


def delta_threshold(op, conservative: bool = False) -> float:
    """End of the interval ``[0, delta)`` on which ``g`` is strictly increasing.

    By default this is the sharp threshold (first zero of ``g'``). With
    ``conservative=True`` the simpler tabulated bound is returned; it never
    exceeds the sharp one (``1/beta`` for distinct real roots with
    ``beta > 0``, ``pi / (2 beta)`` for complex roots with ``alpha <= 0``).
    """
    op = as_operator(op)
    if isinstance(op, DoubleRoot):
        return math.inf if op.alpha <= 0 else 1.0 / op.alpha
    if isinstance(op, DistinctReal):
        if conservative:
            return math.inf if op.beta <= 0 else 1.0 / op.beta
        if op.alpha <= 0:
            return math.inf
        gap = op.beta - op.alpha
        return math.log1p(gap / op.alpha) / gap
    if conservative and op.alpha <= 0:
        return 0.5 * math.pi / op.beta
    return math.atan2(op.beta, op.alpha) / op.beta


def _check_length(op, a: float) -> float:
    a = float(a)
    if not a > 0 or not math.isfinite(a):
        raise DomainError(f"segment length must be positive and finite, got {a}")
    delta = delta_threshold(op)
    if a >= delta:
        raise OutOfRange(f"a={a:.17g} is not below the monotonicity threshold delta={delta:.17g}")
    return a


def t_zero(op, a: float) -> float:
    """Unique ``t0`` in ``(0, a)`` with ``g(t0) = g(a) / 2``."""
    op = as_operator(op)
    a = _check_length(op, a)
    target = 0.5 * g_eval(op, a)
    t0 = optimize.brentq(lambda s: g_eval(op, s) - target, 0.0, a, xtol=1e-14 * a, rtol=4 * np.finfo(float).eps)
    # one Newton step recovers the last digits; g' > 0 on [0, a]
    polished = t0 - (g_eval(op, t0) - target) / g_prime_eval(op, t0)
    if 0 < polished < a and abs(g_eval(op, polished) - target) <= abs(g_eval(op, t0) - target):
        t0 = polished
    return float(t0)


def ext1(op, a: float) -> float:
    """``sup |h(0)|`` over ``||P h|| <= 1``, ``h(a) = h'(a) = 0``; equals ``G(a)``."""
    op = as_operator(op)
    a = _check_length(op, a)
    return G_eval(op, a)


def ext2(op, a: float) -> float:
    """Same as :func:`ext1` with the extra constraint ``h'(0) = 0``.

    Equals ``G(a) - 2 G(t0)`` and is increasing in ``a``.
    """
    op = as_operator(op)
    a = _check_length(op, a)
    return G_eval(op, a) - 2.0 * G_eval(op, t_zero(op, a))


def _h_tilde_parts(op, a, t, t0):
    t = np.asarray(t, dtype=float)
    if np.any(np.isnan(t)) or np.any(t < 0):
        raise DomainError("h_tilde argument must be non-negative")
    inner = t <= t0
    mid = (t > t0) & (t <= a)
    return t, inner, mid


def h_tilde(op, a: float, t, t0: float | None = None):
    """Extremal function: ``G(a-t) - 2G(t0-t)`` on ``[0, t0]``, ``G(a-t)`` up to ``a``, then 0."""
    op = as_operator(op)
    a = _check_length(op, a)
    if t0 is None:
        t0 = t_zero(op, a)
    t, inner, mid = _h_tilde_parts(op, a, t, t0)
    out = np.zeros_like(t)
    out[inner] = G_eval(op, a - t[inner]) - 2.0 * G_eval(op, t0 - t[inner])
    out[mid] = G_eval(op, a - t[mid])
    return _ret(out, t.ndim == 0)


def h_tilde_prime(op, a: float, t, t0: float | None = None):
    """Derivative of :func:`h_tilde`; vanishes at 0 and from ``a`` on."""
    op = as_operator(op)
    a = _check_length(op, a)
    if t0 is None:
        t0 = t_zero(op, a)
    t, inner, mid = _h_tilde_parts(op, a, t, t0)
    out = np.zeros_like(t)
    out[inner] = -g_eval(op, a - t[inner]) + 2.0 * g_eval(op, t0 - t[inner])
    out[mid] = -g_eval(op, a - t[mid])
    return _ret(out, t.ndim == 0)


@dataclass(frozen=True)
class ExtremalProfile:
    operator: OperatorClass
    a: float
    delta: float
    t0: float
    ext1: float
    ext2: float

    def h_tilde(self, t):
        return h_tilde(self.operator, self.a, t, self.t0)

    def h_tilde_prime(self, t):
        return h_tilde_prime(self.operator, self.a, t, self.t0)


def extremal_profile(op, a: float) -> ExtremalProfile:
    op = as_operator(op)
    a = _check_length(op, a)
    t0 = t_zero(op, a)
    G_a = G_eval(op, a)
    return ExtremalProfile(op, a, delta_threshold(op), t0, G_a, G_a - 2.0 * G_eval(op, t0))
