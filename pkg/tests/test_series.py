from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from unicol.padic import to_padic, valuation
from unicol.series import BivariateSeries, DiscSeries, DomainError

P = 5
D = 12

coeff = st.builds(Fraction, st.integers(-50, 50), st.sampled_from([1, 2, 3, 4, 6]))
coeff_lists = st.lists(coeff, min_size=1, max_size=D + 1)
offsets = st.integers(1, 5 ** 4).map(lambda k: P * k)


def series(cs, center=Fraction(1)):
    return DiscSeries.from_list(P, center, cs, D)


def agree(x, y, digits):
    return valuation(x - y, P) >= digits


@given(coeff_lists, coeff_lists, offsets)
def test_evaluation_is_a_ring_map(a, b, t):
    f, g = series(a), series(b)
    z = Fraction(1) + t
    sum_val = (f + g).evaluate(z)
    assert agree(sum_val, to_padic(f.evaluate(z), P, 30) + g.evaluate(z), 10)
    prod_val = (f * g).evaluate(z)
    assert agree(prod_val, to_padic(f.evaluate(z), P, 30) * g.evaluate(z), 10)


@given(coeff_lists)
def test_derivative_inverts_integration(a):
    f = series(a)
    back = f.formal_integral().derivative()
    for n in range(D):
        assert back.coeffs[n] == f.coeffs[n]


def test_evaluation_outside_the_disc_is_refused():
    f = series([Fraction(1), Fraction(2)])
    with pytest.raises(DomainError):
        f.evaluate(Fraction(3))


def test_truncation_error_is_tracked():
    # 1/(1 - t) truncated: the tail at v(t) = 1 has valuation >= D + 1
    f = series([Fraction(1)] * (D + 1))
    val = f.evaluate(Fraction(1) + P)
    assert val.prec <= D + 1
    assert agree(val, to_padic(Fraction(1, 1 - P), P, 40), val.prec)


@given(coeff_lists, coeff_lists)
def test_outer_product_derivatives(a, b):
    f, g = series(a), series(b, Fraction(-1))
    F = BivariateSeries.outer(f, g)
    left = BivariateSeries.outer(f.derivative(), g)
    right = BivariateSeries.outer(f, g.derivative())
    for i in range(D - 1):
        for j in range(D - 1):
            assert F.d_s().coeffs[i][j] == left.coeffs[i][j]
            assert F.d_t().coeffs[i][j] == right.coeffs[i][j]


def test_diagonal_restriction():
    u = DiscSeries.variable(P, Fraction(1), D)
    F = BivariateSeries.outer(u, DiscSeries.constant(P, Fraction(1), Fraction(1), D)) - \
        BivariateSeries.outer(DiscSeries.constant(P, Fraction(1), Fraction(1), D), u)
    diag = F.restrict_diagonal()
    assert all(c == 0 for c in diag.coeffs)
