from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from unicol.literals import LiteralError, parse_form, parse_function, parse_point, parse_rational
from unicol.overconvergent import OverconvergentForm, OverconvergentFunction, PoleSet
from unicol.padic import teichmueller_padic, valuation

P = 5
POLES = PoleSet(P, [0, 1, 2, "inf"], prec=20)


def same(f, g):
    return (f - g).is_zero()


def test_eta_literal_is_the_basis_form():
    w = parse_form("dz/(z - teich(2))", POLES)
    assert (w - OverconvergentForm.basis(POLES, 2)).is_zero()


def test_poly_and_juxtaposition():
    f = parse_function("poly(1, 0, 3)", POLES)
    g = parse_function("1 + 3z^2", POLES)
    assert same(f, g)
    assert same(f, OverconvergentFunction.polynomial(POLES, [1, 0, 3]))


def test_frobenius_log_literal():
    f = parse_function("L(teich(2))", POLES)
    assert same(f, OverconvergentFunction.frobenius_log(POLES, 2))


def test_rational_literal():
    num, den, dz = parse_rational("(z + 1)/(z^2 - z) dz", POLES)
    assert dz == 1
    assert num == [1, 1] and den == [0, -1, 1]


@given(st.integers(1, 4), st.integers(0, 40), st.integers(1, 9))
def test_point_literals(r, k, d):
    c = parse_point(f"teich({r}) + {P * k}/{d}", P, 20)
    expected = teichmueller_padic(r, P, 20) + Fraction(P * k, d)
    assert valuation(c - expected, P) >= 20


@pytest.mark.parametrize("text", ["z +", "teich(", "dz dz", "w + 1", "z^-1"])
def test_malformed_literals(text):
    with pytest.raises((LiteralError, ValueError)):
        parse_form(text, POLES)


def test_function_literal_refuses_dz():
    with pytest.raises(LiteralError):
        parse_function("z dz", POLES)


def test_point_literal_must_be_constant():
    with pytest.raises(LiteralError):
        parse_point("z + 1", P)
