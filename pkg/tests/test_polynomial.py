from fractions import Fraction

from hypothesis import given, settings, strategies as st

from unicol import polynomial as poly
from unicol.padic import valuation

P = 5
small = st.builds(Fraction, st.integers(-30, 30), st.sampled_from([1, 2, 3]))
polys = st.lists(small, min_size=1, max_size=6).map(poly.trim).filter(bool)


@given(polys, polys)
def test_division_identity(a, b):
    q, r = poly.divmod_poly(a, b)
    assert poly.trim(poly.sub(a, poly.add(poly.mul(q, b), r))) == []
    assert poly.degree(r) < poly.degree(b)


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4), st.integers(1, 3))
def test_hensel_split_multiplies_back(roots, e):
    # roots near 0 (multiples of p) and units away from it
    F = [Fraction(1)]
    for k in range(e):
        F = poly.mul(F, [Fraction(-P * (k + 1)), Fraction(1)])
    for r in roots:
        F = poly.mul(F, [Fraction(-(P * r + 1 + abs(r) % 3)), Fraction(1)])
    g, h = poly.hensel_split_at_zero(F, P, 20)
    assert len(g) - 1 == e
    diff = poly.sub(poly.mul(g, h), F)
    assert all(valuation(c, P) >= 18 for c in diff)


@settings(max_examples=30)
@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4), polys)
def test_trace_sum_over_roots(roots, q):
    g = [Fraction(1)]
    for r in roots:
        g = poly.mul(g, [Fraction(-r), Fraction(1)])
    expected = sum((poly.evaluate(q, Fraction(r)) for r in roots), Fraction(0))
    assert poly.trace_sum(q, g) == expected


def test_inverse_modulo_a_factor():
    g = [Fraction(P * P), Fraction(0), Fraction(1)]  # s^2 + p^2
    a = [Fraction(2), Fraction(1)]
    x = poly.inverse_mod(a, g, P, 20)
    one = poly.mod(poly.mul(a, x), g)
    assert valuation(one[0] - 1, P) >= 18
    assert all(valuation(c, P) >= 18 for c in one[1:])


def test_taylor_shift():
    assert poly.taylor_shift([Fraction(0), Fraction(0), Fraction(1)], Fraction(2)) == [4, 4, 1]
