import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import NINE, P_ZERO
from isorec import (ComplexPair, DistinctReal, DomainError, DoubleRoot, G_eval, InvalidCoefficients,
                    OperatorSpec, OutOfRange, classify, delta_threshold, ext1, ext2, extremal_profile,
                    g_eval, g_prime_eval, h_tilde, h_tilde_prime, t_zero)
from isorec.oracle import antiderivative_quadrature


def _span(op, cap=10.0):
    return min(delta_threshold(op), cap)


# ---- classification ------------------------------------------------------------

def test_classify_three_families():
    assert classify(OperatorSpec(0, 0)) == DoubleRoot(0.0)
    assert classify(OperatorSpec(0, -1)) == DistinctReal(-1.0, 1.0)
    assert classify(OperatorSpec(0, 1)) == ComplexPair(0.0, 1.0)


def test_classify_tolerance_folds_tiny_discriminant():
    assert isinstance(classify(OperatorSpec(2.0, 1.0 - 1e-14)), DoubleRoot)
    assert isinstance(classify(OperatorSpec(2.0, 1.0 - 1e-6)), DistinctReal)


@pytest.mark.parametrize("p,q", [(math.nan, 0), (0, math.inf), (-math.inf, 1)])
def test_non_finite_coefficients(p, q):
    with pytest.raises(InvalidCoefficients):
        OperatorSpec(p, q)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_classify_round_trips_coefficients(p, q):
    op = classify(OperatorSpec(p, q))
    scale = max(1.0, abs(p), abs(q))
    assert op.p == pytest.approx(p, abs=1e-9 * scale)
    assert op.q == pytest.approx(q, abs=1e-9 * scale + 1e-12 * max(1.0, p * p))


# ---- kernel -------------------------------------------------------------------

def test_g_examples():
    assert g_eval(DoubleRoot(0.0), 0.37) == pytest.approx(0.37, abs=0)
    assert g_eval(DistinctReal(-1.0, 1.0), 1.0) == pytest.approx(math.sinh(1.0), rel=1e-15)
    assert g_eval(ComplexPair(0.0, 2.0), math.pi / 4) == pytest.approx(0.5, rel=1e-15)


def test_g_prime_examples(op):
    assert g_prime_eval(op, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert g_eval(op, 0.0) == 0.0


def test_g_prime_d2_minus_one_against_difference_quotient():
    op = DistinctReal(-1.0, 1.0)
    h = 1e-6
    fd = (g_eval(op, 1 + h) - g_eval(op, 1 - h)) / (2 * h)
    assert g_prime_eval(op, 1.0) == pytest.approx(math.cosh(1.0), rel=1e-15)
    assert fd == pytest.approx(math.cosh(1.0), rel=1e-9)


def test_G_examples():
    assert G_eval(DoubleRoot(0.0), 1.3) == pytest.approx(1.3**2 / 2, rel=1e-15)
    for b in (0.5, 1.0, 2.0):
        t = 0.7
        assert G_eval(DistinctReal(-b, b), t) == pytest.approx((math.cosh(b * t) - 1) / b**2, rel=1e-13)
    assert G_eval(ComplexPair(0.0, 1.0), 0.0) == 0.0


def test_negative_argument_rejected():
    with pytest.raises(DomainError):
        g_eval(DoubleRoot(0.0), -1e-3)
    with pytest.raises(DomainError):
        G_eval(DoubleRoot(0.0), [0.1, -0.1])


def test_G_matches_quadrature(op):
    ts = np.linspace(0.0, _span(op), 201)[1:] * (1 - 1e-9)
    exact = G_eval(op, ts)
    quad = antiderivative_quadrature(op, ts)
    assert np.all(np.abs(exact - quad) <= 1e-10 * np.maximum(1.0, exact))


def test_G_zero_root_limit():
    # alpha = 0: G(t) = (t + (exp(-beta t) - 1) / beta) / beta
    b = 2.0
    for t in (1e-4, 0.3, 3.0):
        assert G_eval(DistinctReal(0.0, b), t) == pytest.approx((t + math.expm1(-b * t) / b) / b, rel=1e-13)


def test_g_increasing_and_G_convex(op):
    top = _span(op) - 1e-6
    ts = np.linspace(0.0, top, 1000)
    assert np.all(np.diff(g_eval(op, ts)) > 0)
    G = G_eval(op, ts)
    assert np.all(G[2:] - 2 * G[1:-1] + G[:-2] >= -1e-8)


# ---- thresholds ---------------------------------------------------------------

def test_delta_examples():
    assert delta_threshold(DoubleRoot(-1.0)) == math.inf
    assert delta_threshold(ComplexPair(0.0, 1.0)) == pytest.approx(math.pi / 2, rel=1e-15)
    # tabulated bound for distinct real roots with beta > 0 is 1/beta
    assert delta_threshold(DistinctReal(-1.0, 2.0), conservative=True) == 0.5


def test_sharp_delta_is_first_zero_of_g_prime():
    for op in (DoubleRoot(0.7), DistinctReal(1.0, 3.0), ComplexPair(0.5, 2.0), ComplexPair(-0.5, 2.0)):
        d = delta_threshold(op)
        assert abs(g_prime_eval(op, d)) <= 1e-12
        assert delta_threshold(op, conservative=True) <= d


def test_sharp_delta_exceeds_table_for_distinct_real():
    op = DistinctReal(-1.0, 2.0)
    assert delta_threshold(op) == math.inf
    assert g_prime_eval(op, 5.0) > 0


# ---- t0, ext1, ext2 -----------------------------------------------------------

def test_t0_examples():
    assert t_zero(DoubleRoot(0.0), 1.0) == pytest.approx(0.5, abs=1e-14)
    assert t_zero(DistinctReal(-1.0, 1.0), 1.0) == pytest.approx(math.asinh(math.sinh(1) / 2), abs=1e-14)
    assert t_zero(ComplexPair(0.0, 1.0), 1.0) == pytest.approx(math.asin(math.sin(1) / 2), abs=1e-14)


def test_t0_residual(op):
    a = 0.5 * _span(op, 2.0)
    t0 = t_zero(op, a)
    assert 0 < t0 < a
    assert abs(g_eval(op, t0) - 0.5 * g_eval(op, a)) <= 1e-14 * max(1.0, g_eval(op, a))


def test_ext_values():
    for a in (0.1, 1.0, 3.0):
        assert ext1(DoubleRoot(0.0), a) == pytest.approx(a * a / 2, rel=1e-15)
        assert ext2(DoubleRoot(0.0), a) == pytest.approx(a * a / 4, rel=1e-14)
    assert ext1(DistinctReal(-1.0, 1.0), 1.0) == pytest.approx(math.cosh(1) - 1, rel=1e-14)


@pytest.mark.parametrize("b", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("a", [0.3, 1.0])
def test_ext2_closed_form_d2_minus_beta2(a, b):
    c = math.cosh(b * a)
    closed = (1 + c - math.sqrt(c * c + 3)) / b**2
    assert ext2(DistinctReal(-b, b), a) == pytest.approx(closed, abs=1e-10)


def test_small_a_universality(op):
    a = 1e-3
    assert abs(ext1(op, a) / (a * a / 2) - 1) <= 0.01
    assert abs(ext2(op, a) / (a * a / 4) - 1) <= 0.01


def test_out_of_range():
    with pytest.raises(OutOfRange):
        ext2(ComplexPair(0.0, 1.0), 2.0)
    with pytest.raises(OutOfRange):
        t_zero(ComplexPair(0.0, 1.0), math.pi / 2)
    with pytest.raises(DomainError):
        ext1(DoubleRoot(0.0), 0.0)


@given(st.sampled_from(NINE), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_ext2_below_ext1_and_increasing(op, u, v):
    top = _span(op, 3.0)
    a, b = sorted((u * top, v * top))
    assert ext2(op, a) < ext1(op, a)
    if b > a * (1 + 1e-9):
        assert ext2(op, a) < ext2(op, b)


# ---- extremal function --------------------------------------------------------

def test_h_tilde_double_root_profile():
    a = 1.0
    t = np.linspace(0, 0.5, 11)
    # G(a - t) - 2 G(a/2 - t) with G(s) = s^2/2
    expected = (a - t) ** 2 / 2 - (0.5 - t) ** 2
    assert np.allclose(h_tilde(DoubleRoot(0.0), a, t), expected, atol=1e-15)
    assert h_tilde(DoubleRoot(0.0), a, 0.0) == pytest.approx(0.25, abs=1e-15)


def test_h_tilde_boundary_values(op):
    a = 0.5 * _span(op, 2.0)
    prof = extremal_profile(op, a)
    assert prof.h_tilde(a) == 0.0
    assert prof.h_tilde(1.5 * a) == 0.0
    assert prof.h_tilde(0.0) == pytest.approx(prof.ext2, abs=1e-12)
    s = 1e-6 * a
    assert abs((prof.h_tilde(s) - prof.h_tilde(0.0)) / s) <= 1e-5 * max(1.0, prof.ext2 / a)
    assert abs(h_tilde_prime(op, a, 0.0)) <= 1e-9
    assert abs(h_tilde_prime(op, a, a)) <= 1e-9


@pytest.mark.parametrize("op", P_ZERO, ids=["D2", "D2-1", "D2+1"])
def test_h_tilde_non_increasing_for_p_zero(op):
    a = 0.8 * min(delta_threshold(op), 1.5)
    h = h_tilde(op, a, np.linspace(0, a, 5001))
    assert np.all(np.diff(h) <= 1e-15)
