from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spherical_oscillator.special import (
    HypergeometricParams,
    bernoulli,
    dedekind_eta_from_q,
    hyp2f1_coefficients,
    hyp2f1_terminating,
    sphere_volume,
)


# --- hypergeometric -------------------------------------------------------


def test_hyp2f1_at_zero_is_one():
    p = HypergeometricParams(-3.0, 0.7, 2.5, 3)
    assert hyp2f1_terminating(p, 0.0) == 1.0


def test_hyp2f1_first_order():
    p = HypergeometricParams(-1.0, 2.0, 3.0, 1)
    assert hyp2f1_terminating(p, 0.5) == pytest.approx(2.0 / 3.0, abs=1e-15)


def test_hyp2f1_eigenfunction_example_against_mpmath():
    # F(-2, -2 + sqrt5; 2; -1) = (1 + 3 sqrt5) / 6
    p = HypergeometricParams.from_abc(-2.0, -2.0 + math.sqrt(5.0), 2.0)
    assert p.termination_order == 2
    value = hyp2f1_terminating(p, -1.0)
    ref = float(mpmath.hyp2f1(-2, -2 + mpmath.sqrt(5), 2, -1))
    assert value == pytest.approx(ref, rel=1e-14)
    assert value == pytest.approx((1 + 3 * math.sqrt(5)) / 6, rel=1e-14)


def test_hyp2f1_rejects_nonterminating():
    with pytest.raises(ValueError):
        HypergeometricParams(-0.5, 1.0, 1.0, 0)
    with pytest.raises(ValueError):
        HypergeometricParams.from_abc(-0.5, 1.3, 1.0)


def test_hyp2f1_rejects_zero_denominator():
    with pytest.raises(ValueError):
        HypergeometricParams(-3.0, 1.0, -1.0, 3)


def test_hyp2f1_both_terminating_uses_smaller_order():
    assert HypergeometricParams.from_abc(-4.0, -2.0, 1.5).termination_order == 2


@settings(max_examples=200, deadline=None)
@given(
    M=st.integers(0, 8),
    b=st.floats(-6.0, 6.0, allow_nan=False),
    c=st.floats(0.25, 8.0),
    z=st.floats(-3.0, 1.0),
)
def test_hyp2f1_matches_mpmath(M, b, c, z):
    p = HypergeometricParams(-M, b, c, M)
    ref = mpmath.hyp2f1(-M, b, c, z)
    scale = float(sum(abs(x) * abs(z) ** i for i, x in enumerate(hyp2f1_coefficients(p))))
    assert abs(hyp2f1_terminating(p, z) - float(ref)) <= 1e-13 * max(1.0, scale)


def test_hyp2f1_of_minus_r_squared_is_even_in_r():
    p = HypergeometricParams(-3.0, -1.7, 2.5, 3)
    r = np.linspace(0.1, 2.0, 20)
    vals_plus = [hyp2f1_terminating(p, -(x * x)) for x in r]
    vals_minus = [hyp2f1_terminating(p, -((-x) * (-x))) for x in r]
    assert vals_plus == vals_minus
    # odd part of a polynomial fit in r vanishes
    rr = np.concatenate([-r[::-1], r])
    fit = np.polynomial.polynomial.polyfit(rr, vals_plus[::-1] + vals_plus, 6)
    assert np.max(np.abs(fit[1::2])) < 1e-9 * np.max(np.abs(fit))


# --- Bernoulli ------------------------------------------------------------


def test_bernoulli_small_values():
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(4) == Fraction(-1, 30)
    assert bernoulli(6) == Fraction(1, 42)
    assert bernoulli(12) == Fraction(-691, 2730)


@pytest.mark.parametrize("k", [0, 1, 3, 66, -2, 2.5])
def test_bernoulli_rejects(k):
    with pytest.raises(ValueError):
        bernoulli(k)


def _zeta_direct(s: int) -> float:
    # direct sum to N with an Euler-Maclaurin tail
    N = 50
    head = math.fsum(n ** -float(s) for n in range(1, N))
    tail = N ** (1.0 - s) / (s - 1) + 0.5 * N ** -float(s) + s * N ** (-s - 1.0) / 12.0
    tail -= s * (s + 1) * (s + 2) * N ** (-s - 3.0) / 720.0
    return head + tail


@pytest.mark.parametrize("k", range(2, 21, 2))
def test_bernoulli_against_zeta_sum(k):
    # zeta(k) = (-1)^(k/2+1) B_k (2 pi)^k / (2 k!)
    from_b = (-1) ** (k // 2 + 1) * float(bernoulli(k)) * (2 * math.pi) ** k / (2 * math.factorial(k))
    assert from_b == pytest.approx(_zeta_direct(k), rel=1e-12)


def test_bernoulli_sign_alternates():
    signs = [bernoulli(k) > 0 for k in range(2, 65, 2)]
    assert signs == [i % 2 == 0 for i in range(len(signs))]


# --- Dedekind eta ---------------------------------------------------------


def test_eta_special_value():
    # eta(i) = Gamma(1/4) / (2 pi^(3/4)), nome e^{-2 pi}
    ref = math.gamma(0.25) / (2 * math.pi**0.75)
    assert dedekind_eta_from_q(math.exp(-2 * math.pi)) == pytest.approx(ref, rel=1e-15)


def test_eta_small_q_limit():
    q = 1e-12
    assert dedekind_eta_from_q(q) / q ** (1 / 24) == pytest.approx(1.0, rel=1e-11)


def test_eta_against_long_product():
    q = math.exp(-4.0 * 0.3)
    ref = mpmath.mpf(q) ** (mpmath.mpf(1) / 24) * mpmath.nprod(lambda n: 1 - mpmath.mpf(q) ** n, [1, mpmath.inf])
    assert dedekind_eta_from_q(q) == pytest.approx(float(ref), rel=1e-14)


def test_eta_against_pentagonal_series():
    # prod (1 - q^n) = sum_k (-1)^k q^{k(3k-1)/2}
    q = 0.6
    series = math.fsum((-1) ** k * q ** (k * (3 * k - 1) / 2) for k in range(-40, 41))
    assert dedekind_eta_from_q(q) == pytest.approx(q ** (1 / 24) * series, rel=1e-13)


@pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5])
def test_eta_rejects_out_of_range(q):
    with pytest.raises(ValueError):
        dedekind_eta_from_q(q)


# --- sphere volume --------------------------------------------------------


def test_sphere_volumes():
    assert sphere_volume(1) == pytest.approx(2 * math.pi, rel=1e-15)
    assert sphere_volume(2) == pytest.approx(4 * math.pi, rel=1e-15)
    assert sphere_volume(3) == pytest.approx(2 * math.pi**2, rel=1e-15)


def test_sphere_volume_rejects_zero():
    with pytest.raises(ValueError):
        sphere_volume(0)
