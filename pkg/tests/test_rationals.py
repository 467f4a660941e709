from fractions import Fraction

import pytest

from renorm.rationals import (
    IntRows,
    canonical_sign,
    int_form,
    rat,
    rat_str,
    sqrt_floor,
)


def test_rat_roundtrip():
    for text in ("3/4", "-7/2", "5", "0"):
        assert rat_str(rat(text)) == text


def test_rat_rejects_floats():
    with pytest.raises(TypeError):
        rat(0.5)


def test_canonical_sign():
    v = (Fraction(0), Fraction(-2), Fraction(1))
    assert canonical_sign(v) == (Fraction(0), Fraction(2), Fraction(-1))
    assert canonical_sign(canonical_sign(v)) == canonical_sign(v)


def test_int_form():
    v = (Fraction(1, 2), Fraction(2, 3))
    z, q = int_form(v)
    assert q == 6 and z == (3, 4)


def test_sqrt_floor_below_root():
    r = Fraction(11, 10)
    q = sqrt_floor(r, 10**6)
    assert q * q <= r < (q + Fraction(1, 10**6)) ** 2


def test_int_rows_gauge():
    rows = IntRows([(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))])
    z, q = int_form((Fraction(3, 2), Fraction(-1, 2)))
    assert rows.gauge(z, q) == Fraction(3, 2)
    assert not rows.feasible(z, q)
