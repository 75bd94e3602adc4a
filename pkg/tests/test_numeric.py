import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gnedin import numeric
from gnedin.numeric import EXACT, LOG, LogReal

magnitudes = st.floats(min_value=-690.0, max_value=690.0)
signs = st.sampled_from([-1, 1])


def as_log(x):
    return LogReal.from_value(x)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def test_zero_has_sign_zero():
    z = LogReal.from_value(0)
    assert z.sign == 0 and z.is_zero()
    assert float(z) == 0.0
    assert LogReal(0, 5.0).log_abs == -math.inf


def test_invalid_sign_rejected():
    with pytest.raises(ValueError):
        LogReal(2, 0.0)


@given(signs, magnitudes)
def test_float_round_trip(sign, mag):
    x = sign * math.exp(mag)
    assert rel(float(as_log(x)), x) < 1e-12


@given(st.integers(min_value=-299, max_value=299), st.integers(1, 10**6), signs)
def test_rational_round_trip_through_log(exp10, mant, sign):
    x = sign * Fraction(mant) * Fraction(10) ** exp10
    back = Fraction(float(as_log(x)))
    assert abs(back - x) <= Fraction(1, 10**12) * abs(x)


@given(signs, magnitudes, signs, magnitudes)
def test_arithmetic_matches_float(s1, m1, s2, m2):
    a, b = s1 * math.exp(m1 / 3), s2 * math.exp(m2 / 3)
    la, lb = as_log(a), as_log(b)
    assert rel(float(la * lb), a * b) < 1e-12
    assert rel(float(la / lb), a / b) < 1e-12
    total = a + b
    if abs(total) > 1e-9 * max(abs(a), abs(b)):
        assert abs(float(la + lb) - total) <= 1e-12 * max(abs(a), abs(b))
    assert float(la - la) == 0.0


def test_cancellation_is_exact_zero():
    x = as_log(3.5)
    assert (x - x).sign == 0
    assert (x + (-x)).is_zero()


@pytest.mark.parametrize("p", [0, 1, 2, 3, 7])
def test_integer_power_sign(p):
    assert float(as_log(-2.0) ** p) == pytest.approx((-2.0) ** p)


def test_huge_values_stay_finite_in_log_space():
    big = LogReal(1, 5000.0)
    assert not big.representable()
    assert (big * big).log_abs == 10000.0
    assert (big / big).log_abs == 0.0


def test_log_sum_of_many_terms():
    vals = [as_log(1e-3)] * 1000
    assert float(numeric.log_sum(vals)) == pytest.approx(1.0, rel=1e-12)
    assert numeric.log_sum([]).is_zero()


def test_scalar_reads_floats_through_repr():
    assert numeric.scalar(0.3, EXACT) == Fraction(3, 10)
    assert numeric.scalar(Fraction(1, 3), LOG) == pytest.approx(1 / 3)


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        numeric.value(1, "float")
