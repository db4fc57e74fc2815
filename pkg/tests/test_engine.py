import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_engine, random_overconvergent, random_point
from unicol.engine import (ColemanEngine, ColemanForm, ColemanFunction, _agreement,
                           engine_precision, log_closed_form, shuffle)
from unicol.overconvergent import OverconvergentForm, PoleSet
from unicol.padic import to_padic

words = st.lists(st.sampled_from([0, 1, 2]), max_size=4).map(tuple)
seeds = st.integers(0, 10 ** 6)


@given(words, words)
def test_shuffle_counts(u, v):
    sh = shuffle(u, v)
    assert sum(sh.values()) == comb(len(u) + len(v), len(u))
    assert all(len(w) == len(u) + len(v) for w in sh)
    assert sh == shuffle(v, u)


def test_shuffle_small_case():
    assert shuffle((0,), (1,)) == {(0, 1): 1, (1, 0): 1}
    assert shuffle((0,), (0,)) == {(0, 0): 2}


def test_engine_precision_budget():
    assert engine_precision(12, 4) == 24


def test_log_oracle_for_a_larger_prime():
    rng = random.Random(11)
    eng = ColemanEngine(PoleSet(11, [0, 3, "inf"], prec=16), 2, max_word_length=1)
    for _ in range(8):
        z = random_point(rng, eng.poles)
        for a in (0, 3):
            d = eng.evaluate_theta(eng.I((a,)), z) - log_closed_form(eng, a, z)
            assert _agreement(d, 11) >= 12


@pytest.mark.parametrize("p", [5, 7])
def test_iterated_integrals_vanish_at_the_base(p):
    eng = make_engine(p)
    for w in [(0,), (1, 0), (0, 1, 1)]:
        v = eng.evaluate_theta(eng.I(w), eng.b)
        assert _agreement(to_padic(v, p, eng.poles.prec), p) >= 12


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_products_evaluate_pointwise(seed):
    rng = random.Random(seed)
    eng = make_engine(5)
    f = ColemanFunction.make(eng, {(rng.choice(eng.letters),): random_overconvergent(rng, eng.poles, 1, 1)})
    g = ColemanFunction.make(eng, {(rng.choice(eng.letters),): random_overconvergent(rng, eng.poles, 1, 1),
                                   (): random_overconvergent(rng, eng.poles, 1, 1)})
    z = random_point(rng, eng.poles)
    d = eng.evaluate_theta(f * g, z) - eng.evaluate_theta(f, z) * eng.evaluate_theta(g, z)
    assert _agreement(d, 5) >= 12


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_primitive_takes_the_requested_value(seed):
    rng = random.Random(seed)
    eng = make_engine(5)
    omega = ColemanForm.make(eng, {(rng.choice(eng.letters),): random_overconvergent(rng, eng.poles, 1, 1)})
    r = rng.choice(eng.poles.centers)
    at = random_point(rng, eng.poles, r)
    value = Fraction(rng.randint(-9, 9))
    F = eng.coleman_primitive(omega, value, at)
    assert F.d().equals(omega)
    assert _agreement(eng.evaluate_theta(F, at) - value, 5) >= 12


@pytest.mark.parametrize("w", [(0,), (1, 0), (0, 1, 1)])
def test_local_expansions_satisfy_the_differential_equation(w):
    eng = make_engine(5)
    for r in eng.poles.centers:
        D = 20
        lhs = eng.local_expansion(w, r, D).derivative()
        rhs = eng.local_expansion(w[:-1], r, D) * eng.eta_coeff(w[-1]).expand_at(r, D)
        for n in range(D - 1):
            assert _agreement(to_padic(lhs.coeffs[n] - rhs.coeffs[n], 5, 30), 5) >= 12


def test_square_of_a_logarithm():
    rng = random.Random(3)
    eng = make_engine(7)
    for _ in range(5):
        z = random_point(rng, eng.poles)
        l1 = eng.evaluate_theta(eng.I((1,)), z)
        d = eng.evaluate_theta(eng.I((1, 1)), z) * 2 - l1 * l1
        assert _agreement(d, 7) >= 12


def test_primitive_of_exact_form_is_overconvergent():
    eng = make_engine(5)
    g = random_overconvergent(random.Random(5), eng.poles)
    F = eng.coleman_primitive(OverconvergentForm(g.derivative()))
    assert F.degree() == 0
