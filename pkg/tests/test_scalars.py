from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from qspair.scalars import (ONE, ZERO, FitError, Scalar, TruncSeries, fit_rational, parse_scalar,
                            qbinom, qint, qpow, rho, specialize, V)

v = sympy.Symbol("v")


def to_sympy(s: Scalar):
    num = sum(c * v ** k for k, c in enumerate(s.numerator_coeffs()))
    den = sum(c * v ** k for k, c in enumerate(s.denominator_coeffs()))
    return num / den


laurent = st.builds(
    lambda cs, shift: sum((ONE * c * V ** (k + shift) for k, c in enumerate(cs)), ZERO),
    st.lists(st.integers(-4, 4), min_size=1, max_size=4), st.integers(-3, 3))
nonzero = laurent.filter(lambda s: not s.is_zero())


def test_qint_examples():
    assert qint(0) == ZERO
    assert qint(1) == ONE
    assert qint(2) == qpow(1) + qpow(-1)


def test_qint_negative_and_binomial():
    assert qint(-3) == -qint(3)
    assert qbinom(3, 1) == qint(3)
    assert qbinom(4, 2) == qint(4) * qint(3) / (qint(2) * qint(1))


def test_q_is_v_squared():
    assert parse_scalar("q") == V * V
    assert parse_scalar("q^3") == parse_scalar("v^6")
    assert parse_scalar("q^-3") * parse_scalar("q^3") == ONE
    assert parse_scalar("2*q - 1") == qpow(1) * 2 - 1


def test_parse_errors():
    with pytest.raises(ValueError):
        parse_scalar("q^(-1)")
    with pytest.raises(ValueError):
        parse_scalar("q^")


def test_canonical_form():
    s = (V * 2) / (V * 4)
    assert s.numerator_coeffs() == [1] and s.denominator_coeffs() == [2]
    t = ONE / (ONE - V)
    assert t.denominator_coeffs()[-1] > 0
    assert t == -ONE / (V - 1)


def test_str_roundtrip():
    for s in [qpow(3), rho(), qint(3) / qint(2), ONE - qpow(-2)]:
        assert parse_scalar(str(s)) == s


@given(laurent, laurent, laurent)
def test_ring_axioms_against_sympy(a, b, c):
    assert to_sympy(a * (b + c)).equals(to_sympy(a) * (to_sympy(b) + to_sympy(c)))
    assert (a + b) - b == a
    assert a * b == b * a


@given(nonzero)
def test_inverse(a):
    assert a * a.inverse() == ONE


@given(laurent, laurent)
def test_specialize_is_a_homomorphism(a, b):
    x = Fraction(3)
    assert specialize(a * b, x) == specialize(a, x) * specialize(b, x)
    assert specialize(a + b, x) == specialize(a, x) + specialize(b, x)


def test_specialize_known():
    assert specialize(qint(2), 3) == Fraction(9) + Fraction(1, 9)


# -- truncated series -----------------------------------------------------------------------

def test_exp_of_linear_series():
    h = qpow(2)
    e = TruncSeries([ZERO, h, ZERO], 2).exp()
    assert e.coeffs == [ONE, h, h * h / 2]


def test_exp_log_roundtrip():
    s = TruncSeries([ZERO, qpow(1), rho(), qint(3)], 3)
    assert s.exp().log() == s


def test_theta_from_h_order_two():
    h1, h2 = qpow(3), qint(2)
    th = TruncSeries([ZERO, rho() * h1, rho() * h2], 2).exp()
    assert th.coeffs[1] == rho() * h1
    assert th.coeffs[2] == rho() * (h2 + rho() * h1 * h1 / 2)


def test_series_truncation_consistent():
    a = TruncSeries([ONE, qpow(1), qpow(2), qpow(3)], 3)
    b = TruncSeries([ONE, rho(), ONE, ONE], 3)
    full = TruncSeries([sum((a.coeffs[i] * b.coeffs[k - i] for i in range(k + 1)), ZERO)
                        for k in range(4)], 3)
    assert a * b == full
    assert (a * b).truncate(2) == a.truncate(2) * b.truncate(2)


def test_series_inverse():
    a = TruncSeries([qpow(1), ONE, rho()], 2)
    assert a * a.inverse() == TruncSeries([ONE, ZERO, ZERO], 2)
    with pytest.raises((ZeroDivisionError, ValueError)):
        TruncSeries([ZERO, ONE], 1).inverse()


def test_fit_rational_examples():
    a = qpow(2)
    geo = TruncSeries([ONE, a, a * a, a ** 3], 3)
    num, den = fit_rational(geo, 0, 1)
    assert num == [ONE] and den == [ONE, -a]
    c = TruncSeries([qpow(5), ZERO, ZERO], 2)
    assert fit_rational(c, 0, 0) == ([qpow(5)], [ONE])


def test_fit_rational_derived_target():
    a, q = qpow(3), qpow(1)
    num, den = [ONE, -(a / q)], [ONE, -(a * q)]
    s = TruncSeries.from_rational(num, den, 4)
    n2, d2 = fit_rational(s, 1, 1)
    assert n2 == num and d2 == den


def test_fit_rational_failure():
    s = TruncSeries([ZERO, ONE], 1)          # z is not c / (1 - bz)
    assert fit_rational(s, 0, 1) is None
    with pytest.raises(FitError):
        fit_rational(s, 1, 1)
