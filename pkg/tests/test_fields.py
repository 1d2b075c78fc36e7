from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from khcurves.fields import (
    CompositeModulus, DivisionByZero, FieldMismatch,
    Scalar, field_make, scalar_arith,
)


def test_field_make_basic():
    assert field_make("F2").char == 2
    assert field_make("F5").char == 5
    assert field_make("Q").char == 0
    assert field_make(7) is field_make("F7")


def test_composite_modulus_rejected():
    with pytest.raises(CompositeModulus):
        field_make("F6")
    with pytest.raises(CompositeModulus):
        field_make(1)


def test_scalar_arith_examples():
    F2 = field_make("F2")
    one = Scalar(F2, 1)
    assert not scalar_arith("add", one, one)  # 1+1 = 0 in F2
    Q = field_make("Q")
    x = Scalar(Q, Fraction(2, 3))
    assert scalar_arith("inv", x).value == Fraction(3, 2)
    F5 = field_make("F5")
    assert scalar_arith("mul", Scalar(F5, 3), Scalar(F5, 4)).value == 2


def test_inv_zero_raises():
    with pytest.raises(DivisionByZero):
        scalar_arith("inv", Scalar(field_make("F3"), 0))


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        Scalar(field_make("F2"), 1) + Scalar(field_make("F3"), 1)


@pytest.mark.parametrize("spec", ["F2", "F3", "F5", "F31", "Q"])
@given(data=st.data())
def test_field_axioms(spec, data):
    F = field_make(spec)
    if F.kind == "Q":
        raw = st.fractions(max_denominator=50)
    else:
        raw = st.integers(min_value=0, max_value=F.char - 1)
    a = data.draw(raw)
    b = data.draw(raw)
    c = data.draw(raw)
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == F.zero
    if not F.is_zero(a):
        assert F.mul(a, F.inv(a)) == F.one


@pytest.mark.parametrize("spec", ["F2", "F7", "Q"])
@given(data=st.data())
def test_canonical_idempotence(spec, data):
    F = field_make(spec)
    n = data.draw(st.integers(min_value=-10**6, max_value=10**6))
    v = F.canon(n)
    assert F.canon(v) == v
