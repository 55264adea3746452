"""Brute-force checks of the univariate extremal results.

Everything here goes through adaptive quadrature and direct search rather
than the closed forms of :mod:`isorec.operators`:

* ``solve_bvp`` integrates the Green's representation for a given load,
* ``l1_best_approx`` minimises ``||g - c g'||_1`` over ``c`` numerically,
* ``class_membership_check`` applies ``P(d/dt)`` to sampled data with
  finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import OracleFailure, OutOfRange, PreconditionError
from .operators import DistinctReal, DoubleRoot, _check_length, as_operator, t_zero

__all__ = [
    "QuadratureSpec",
    "ControlFunction",
    "L1Approximation",
    "Membership",
    "scalar_kernel",
    "integrate_pieces",
    "antiderivative_quadrature",
    "solve_bvp",
    "l1_best_approx",
    "sign_pattern_check",
    "class_membership_check",
]


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-14
    rel_tol: float = 1e-13
    max_subdivisions: int = 200

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise PreconditionError("quadrature tolerances must be non-negative")
        if self.max_subdivisions < 1:
            raise PreconditionError("max_subdivisions must be positive")


@dataclass(frozen=True)
class ControlFunction:
    """Right-hand side ``phi`` of the terminal-value problem, ``|phi| <= 1``."""

    rule: Callable[[float], float]
    jumps: tuple = field(default_factory=tuple)

    def __call__(self, tau: float) -> float:
        return self.rule(tau)

    @classmethod
    def constant(cls, c: float) -> "ControlFunction":
        return cls(lambda tau: c)

    @classmethod
    def switch(cls, t0: float) -> "ControlFunction":
        """``sign(tau - t0)`` with the convention ``sign(0) = +1``."""
        return cls(lambda tau: 1.0 if tau >= t0 else -1.0, (t0,))

    def check_bound(self, a: float, samples: int = 1001) -> None:
        taus = np.linspace(0.0, a, samples)
        worst = max(abs(self.rule(float(s))) for s in taus)
        if worst > 1.0 + 1e-15:
            raise PreconditionError(f"control exceeds unit bound: max |phi| = {worst}")


def scalar_kernel(op) -> Callable[[float], float]:
    """Plain-float ``g`` for use inside quadrature loops."""
    op = as_operator(op)
    if isinstance(op, DoubleRoot):
        al = op.alpha
        return lambda t: t * math.exp(-al * t)
    if isinstance(op, DistinctReal):
        m, h = 0.5 * (op.alpha + op.beta), 0.5 * (op.beta - op.alpha)
        return lambda t: math.exp(-m * t) * math.sinh(h * t) / h
    al, be = op.alpha, op.beta
    return lambda t: math.exp(-al * t) * math.sin(be * t) / be


def _scalar_kernel_prime(op) -> Callable[[float], float]:
    op = as_operator(op)
    if isinstance(op, DoubleRoot):
        al = op.alpha
        return lambda t: (1.0 - al * t) * math.exp(-al * t)
    if isinstance(op, DistinctReal):
        m, h = 0.5 * (op.alpha + op.beta), 0.5 * (op.beta - op.alpha)
        return lambda t: math.exp(-m * t) * (math.cosh(h * t) - m * math.sinh(h * t) / h)
    al, be = op.alpha, op.beta
    return lambda t: math.exp(-al * t) * (math.cos(be * t) - al * math.sin(be * t) / be)


def _quad(f, lo: float, hi: float, spec: QuadratureSpec) -> float:
    if hi <= lo:
        return 0.0
    res = integrate.quad(f, lo, hi, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                         limit=spec.max_subdivisions, full_output=1)
    value, abserr = res[0], res[1]
    if len(res) > 3:
        ier_msg = res[3]
        # roundoff flags are harmless when the error estimate is still tiny
        allowed = 10.0 * max(spec.abs_tol, spec.rel_tol * abs(value))
        if "maximum number of subdivisions" in ier_msg or abserr > allowed:
            raise OracleFailure(f"quadrature on [{lo}, {hi}] did not converge: {ier_msg.strip()}")
    return value


def integrate_pieces(f, breaks: Sequence[float], spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Integral of ``f`` over ``[breaks[0], breaks[-1]]`` split at every break point."""
    pieces = [_quad(f, lo, hi, spec) for lo, hi in zip(breaks[:-1], breaks[1:])]
    return math.fsum(pieces)


def antiderivative_quadrature(op, ts, spec: QuadratureSpec = QuadratureSpec()) -> np.ndarray:
    """``int_0^t g`` for every ``t`` in ``ts`` by adaptive quadrature.

    Consecutive sorted points share work: the integral over each gap is
    computed once and the pieces are accumulated with compensated sums.
    """
    g = scalar_kernel(op)
    ts = np.asarray(ts, dtype=float)
    order = np.argsort(ts)
    sorted_t = ts[order]
    pieces = []
    out = np.empty_like(ts)
    prev = 0.0
    for idx, t in zip(order, sorted_t):
        pieces.append(_quad(g, prev, float(t), spec))
        out[idx] = math.fsum(pieces)
        prev = float(t)
    return out


def solve_bvp(op, a: float, phi: ControlFunction, t: float,
              quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Solution at ``t`` of ``P(d/dt) f = phi`` with ``f(a) = f'(a) = 0``.

    Uses the Green's representation ``f(t) = int_t^a g(tau - t) phi(tau) dtau``.
    """
    op = as_operator(op)
    a = _check_length(op, a)
    if not 0.0 <= t <= a:
        raise PreconditionError(f"t={t} outside [0, {a}]")
    phi.check_bound(a)
    g = scalar_kernel(op)
    breaks = [t] + sorted(j for j in phi.jumps if t < j < a) + [a]
    return integrate_pieces(lambda tau: g(tau - t) * phi(tau), breaks, quad)


class L1Approximation(NamedTuple):
    c0: float
    value: float


def _sign_changes(r, a: float, grid: int = 257) -> list:
    taus = np.linspace(0.0, a, grid)
    vals = np.array([r(float(s)) for s in taus])
    roots = []
    for i in range(grid - 1):
        lo, hi = vals[i], vals[i + 1]
        if lo == 0.0 and i > 0:
            roots.append(float(taus[i]))
        elif lo * hi < 0:
            roots.append(optimize.brentq(r, taus[i], taus[i + 1], xtol=1e-15 * max(a, 1e-300)))
    return roots


def l1_best_approx(op, a: float, quad: QuadratureSpec = QuadratureSpec()) -> L1Approximation:
    """Best ``L1[0, a]`` approximation of ``g`` from ``span{g'}``.

    The objective ``c -> int |g - c g'|`` is convex in ``c``; a bracket is
    grown from ``[0, 2 g(a) / g'(a)]`` and then narrowed by golden-section
    search. Each objective value is integrated piecewise between the sign
    changes of the residual.
    """
    op = as_operator(op)
    a = _check_length(op, a)
    g, gp = scalar_kernel(op), _scalar_kernel_prime(op)

    def objective(c: float) -> float:
        r = lambda tau: g(tau) - c * gp(tau)
        breaks = [0.0] + _sign_changes(r, a) + [a]
        return integrate_pieces(lambda tau: abs(r(tau)), breaks, quad)

    lo, hi = 0.0, 2.0 * g(a) / gp(a)
    for _ in range(50):
        cs = np.linspace(lo, hi, 9)
        fs = [objective(float(c)) for c in cs]
        k = int(np.argmin(fs))
        if k == len(cs) - 1:
            hi = lo + 2.0 * (hi - lo)
        elif k == 0:
            lo = lo - (hi - lo)
        else:
            break
    else:
        raise OracleFailure("bracket for the L1 minimiser did not close within 50 doublings")

    bracket = (float(cs[k - 1]), float(cs[k]), float(cs[k + 1]))
    res = optimize.minimize_scalar(objective, bracket=bracket, method="golden", tol=1e-12)
    c0 = float(res.x)
    return L1Approximation(c0, float(objective(c0)))


def sign_pattern_check(op, a: float, c0: float, grid: int = 10_000) -> bool:
    """Whether ``sign(g - c0 g') == sign(tau - t0)`` off a small window around ``t0``."""
    op = as_operator(op)
    a = _check_length(op, a)
    t0 = t_zero(op, a)
    g, gp = scalar_kernel(op), _scalar_kernel_prime(op)
    for tau in np.linspace(0.0, a, grid):
        tau = float(tau)
        if abs(tau - t0) <= 1e-6 * a:
            continue
        expected = 1.0 if tau >= t0 else -1.0
        if np.sign(g(tau) - c0 * gp(tau)) != expected:
            return False
    return True


class Membership(NamedTuple):
    max_residual: float
    ok: bool


def class_membership_check(op, h, step: float, kinks: Sequence[float] | None = None) -> Membership:
    """Estimate ``max |h'' + p h' + q h|`` from samples ``h[i] = h(i * step)``.

    Interior points whose 3-point stencil touches a kink are skipped; by
    default the kinks are ``t0`` and ``a``, with ``a = (len(h) - 1) * step``.
    The allowance ``1 + 1e-6 + 10 step^2`` covers second-order truncation.
    """
    op = as_operator(op)
    hs = np.asarray(h, dtype=float)
    if hs.ndim != 1 or hs.size < 3:
        raise PreconditionError("need a 1-D sample array with at least 3 points")
    if not step > 0:
        raise PreconditionError("step must be positive")
    a = step * (hs.size - 1)
    if step > a / 100 * (1 + 1e-12):
        raise PreconditionError(f"grid too coarse: step {step} > a/100 = {a / 100}")
    if kinks is None:
        kinks = [a]
        try:
            kinks.append(t_zero(op, a))
        except OutOfRange:
            pass
    ts = step * np.arange(1, hs.size - 1)
    d2 = (hs[2:] - 2.0 * hs[1:-1] + hs[:-2]) / step**2
    d1 = (hs[2:] - hs[:-2]) / (2.0 * step)
    res = np.abs(d2 + op.p * d1 + op.q * hs[1:-1])
    keep = np.ones(res.shape, dtype=bool)
    for k in kinks:
        keep &= np.abs(ts - k) > 1.5 * step
    worst = float(res[keep].max()) if np.any(keep) else 0.0
    return Membership(worst, worst <= 1.0 + 1e-6 + 10.0 * step**2)
