from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hierarchy_lab.algebra import SQRT2, QSqrt2, to_float

fractions = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)
elements = st.builds(QSqrt2, fractions, fractions)


def test_conjugate_product_is_one():
    assert (SQRT2 - 1) * (SQRT2 + 1) == 1


def test_global_value_float():
    v = 2 * (3 - 2 * SQRT2)
    assert abs(to_float(v) - 0.34314575050761980) < 1e-16


def test_sdsos_value_is_negative():
    assert (4 * (1 - SQRT2)).sign() < 0
    assert 4 * (1 - SQRT2) < 0


def test_invert_zero_raises():
    with pytest.raises(ZeroDivisionError):
        QSqrt2(0).invert()
    with pytest.raises(ZeroDivisionError):
        QSqrt2(1) / QSqrt2(0)


def test_representation_unique():
    assert QSqrt2(1, 2) == QSqrt2(Fraction(2, 2), Fraction(4, 2))
    assert QSqrt2(1, 2) != QSqrt2(1, 3)
    assert QSqrt2(3) == 3
    assert hash(QSqrt2(Fraction(1, 2))) == hash(Fraction(1, 2))


def test_sqrt2_powers():
    assert QSqrt2.sqrt2_power(0) == 1
    assert QSqrt2.sqrt2_power(2) == 2
    assert QSqrt2.sqrt2_power(3) == 2 * SQRT2
    assert QSqrt2.sqrt2_power(-1) * SQRT2 == 1


def test_float_is_correctly_rounded_near_cancellation():
    # a - b*sqrt2 with a/b a convergent of sqrt2: naive float evaluation loses all digits
    v = QSqrt2(665857, -470832)
    exact = 1 / (665857 + 470832 * 2**0.5)
    assert abs(float(v) - exact) <= 1e-15 * exact


def test_rejects_float_components():
    with pytest.raises(TypeError):
        QSqrt2(0.5)


@given(elements, elements, elements)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == 0
    if a != 0:
        assert a * a.invert() == 1
        assert (b / a) * a == b


@given(elements, elements)
def test_order_is_total_and_consistent(a, b):
    assert (a < b) + (a == b) + (a > b) == 1
    if a <= b:
        assert a + 1 <= b + 1


@given(elements)
def test_sign_agrees_with_float(a):
    x = float(a)
    if abs(x) > 1e-12:
        assert a.sign() == (1 if x > 0 else -1)


@given(elements)
def test_parse_render_round_trip(a):
    assert QSqrt2.parse(str(a)) == a
