"""Acceptance criteria, one test per criterion; each prints a PASS/FAIL line."""
import random
import time
from fractions import Fraction
from itertools import product

import pytest

from conftest import make_engine, random_field_element, random_overconvergent, random_point, record
from unicol.connections import (AbstractColemanFunction, ExactCalculus, ExactColemanFunction,
                                FunctionField, Transporter, UnipotentConnection, matmul,
                                minimal_representative, to_abstract, zero_test)
from unicol.engine import ColemanEngine, ColemanForm, _agreement, shuffle
from unicol.overconvergent import OverconvergentForm, PoleSet
from unicol.padic import PadicNumber, log_unit

TOL = 10


def _words(letters, max_len):
    out = []
    for m in range(1, max_len + 1):
        out.extend(product(letters, repeat=m))
    return out


# 1 -------------------------------------------------------------------------------
def test_criterion_01_single_integral_oracle():
    rng = random.Random(101)
    worst, elapsed = {}, {}
    for p in (5, 7):
        t0 = time.perf_counter()
        poles = PoleSet(p, [0, 1, "inf"], prec=12 + 6)
        eng = ColemanEngine(poles, 3, max_word_length=1)
        b = eng.b
        centers = poles.centers
        pts = [random_point(rng, poles, centers[k % len(centers)]) for k in range(25)]
        w = 10 ** 9
        for a in poles.finite:
            la = poles.lift(a)
            f = eng.I((a,))
            for z in pts:
                oracle = log_unit((z - la) / (b - la), p)
                w = min(w, _agreement(eng.evaluate_theta(f, z) - oracle, p))
        elapsed[p] = time.perf_counter() - t0
        worst[p] = w
    ok = all(worst[p] >= TOL for p in worst) and sum(elapsed.values()) < 10
    record(1, ok, f"min agreement {worst} digits, runtime {sum(elapsed.values()):.2f}s")
    assert ok


# 2 -------------------------------------------------------------------------------
def test_criterion_02_teichmueller_vanishing():
    details = []
    ok = True
    for p in (5, 7):
        eng = make_engine(p)
        for r in eng.poles.centers:
            v = eng.center_value((0,), r)
            zero = v == 0 if not isinstance(v, PadicNumber) else v.is_zero()
            prec = v.prec if isinstance(v, PadicNumber) else "exact"
            details.append(f"p={p} c={r}: {prec}")
            ok = ok and zero and (not isinstance(v, PadicNumber) or v.prec >= eng.poles.prec)
    record(2, ok, "I_(0)(c) = 0 at " + ", ".join(details))
    assert ok


# 3 -------------------------------------------------------------------------------
def test_criterion_03_shuffle_suite():
    rng = random.Random(303)
    worst = {}
    npairs = 0
    for p in (5, 7):
        eng = make_engine(p)
        pts = [random_point(rng, eng.poles) for _ in range(20)]
        words = _words(eng.letters, 4)
        val = {(w, k): eng.evaluate_theta(eng.I(w), z) for w in words for k, z in enumerate(pts)}
        w_min = 10 ** 9
        for u in _words(eng.letters, 3):
            for v in _words(eng.letters, 4 - len(u)):
                npairs += 1
                sh = shuffle(u, v)
                for k in range(len(pts)):
                    lhs = val[u, k] * val[v, k]
                    rhs = sum((m * val[w, k] for w, m in sh.items()), Fraction(0))
                    w_min = min(w_min, _agreement(lhs - rhs, p))
        worst[p] = w_min
    ok = all(v >= TOL for v in worst.values())
    record(3, ok, f"{npairs} word pairs x 20 points, min agreement {worst}")
    assert ok


# 4 -------------------------------------------------------------------------------
def test_criterion_04_path_composition():
    rng = random.Random(404)
    worst = {}
    for p in (5, 7):
        eng = make_engine(p, max_len=2)
        F = FunctionField(p, eng.poles.prec)
        M = UnipotentConnection.word_connection(F, [(), (0,), (1,), (0, 1)])
        T = Transporter(M, eng)
        # frames based at each center give transports independent of the base frame
        local = {r: Transporter(M, make_engine(p, base=r, max_len=2)) for r in eng.poles.centers}
        w_min = 10 ** 9
        for _ in range(10):
            x, y, z = (rng.choice(eng.poles.centers) for _ in range(3))
            Axz = T.transport(x, z)
            prod_ = matmul(T.transport(x, y), T.transport(y, z))
            prod_local = matmul(local[x].frame_at(y), local[y].frame_at(z))
            for i in range(4):
                for j in range(4):
                    w_min = min(w_min, _agreement(Axz[i][j] - prod_[i][j], p),
                                _agreement(Axz[i][j] - prod_local[i][j], p))
        worst[p] = w_min
    ok = all(v >= TOL for v in worst.values())
    record(4, ok, f"rank 4, 10 triples per prime, min agreement {worst}")
    assert ok


# 5 -------------------------------------------------------------------------------
def test_criterion_05_frobenius_equivariance():
    rng = random.Random(505)
    worst = {}
    for p in (5, 7):
        eng = make_engine(p)
        pts = [random_point(rng, eng.poles) for _ in range(8)]
        for w in [(0,), (1,), (1, 0), (0, 1)]:
            rep = eng.frobenius_equivariance_check(eng.I(w), pts)
            worst[(p, w)] = rep["min_agreement"]
    ok = all(v >= TOL for v in worst.values())
    record(5, ok, "min agreement " + ", ".join(f"p={p} {w}: {v}" for (p, w), v in worst.items()))
    assert ok


# 6 -------------------------------------------------------------------------------
def _random_coleman_form(rng, eng, max_len=3):
    terms = {}
    for _ in range(rng.randint(1, 3)):
        w = tuple(rng.choice(eng.letters) for _ in range(rng.randint(0, max_len)))
        terms[w] = random_overconvergent(rng, eng.poles, max_poly=2, max_pole=2)
    return ColemanForm.make(eng, terms)


def _random_coleman_function(rng, eng, max_len=3):
    from unicol.engine import ColemanFunction
    terms = {}
    for _ in range(rng.randint(1, 3)):
        w = tuple(rng.choice(eng.letters) for _ in range(rng.randint(0, max_len)))
        terms[w] = random_overconvergent(rng, eng.poles, max_poly=2, max_pole=2)
    return ColemanFunction.make(eng, terms)


def _forms_equal(a, b):
    if set(a.terms) != set(b.terms):
        return False
    return all((a.terms[w] - b.terms[w]).is_zero() for w in a.terms)


def test_criterion_06_exactness_at_one_forms():
    rng = random.Random(606)
    p = 5
    # base teich(4) = -1 keeps normalizing constants rational
    eng = make_engine(p, base=4, max_len=4)
    F = FunctionField(p, eng.poles.prec)
    calc = ExactCalculus(F, eng.letters, eng.base)
    syntactic = 0
    for _ in range(50):
        omega = _random_coleman_form(rng, eng)
        prim = eng.coleman_primitive(omega)
        if _forms_equal(prim.d(), omega):
            syntactic += 1
    constants = 0
    for _ in range(10):
        f = _random_coleman_function(rng, eng)
        g = eng.coleman_primitive(f.d())
        fb = f.terms[()].evaluate(eng.b) if () in f.terms else Fraction(0)
        h = g - f + fb
        exact = ExactColemanFunction.from_engine(calc, h)
        if zero_test(to_abstract(exact)):
            constants += 1
    ok = syntactic == 50 and constants == 10
    record(6, ok, f"d(primitive) = form syntactically {syntactic}/50; "
                  f"primitive(df) - f + f(b) passes zero_test {constants}/10")
    assert ok


# 7 -------------------------------------------------------------------------------
def _random_exact_function(rng, calc, max_len=3, nterms=3):
    F = calc.F
    terms = {}
    for _ in range(rng.randint(1, nterms)):
        w = tuple(rng.choice(calc.letters) for _ in range(rng.randint(0, max_len)))
        terms[w] = random_field_element(rng, F, calc.letters, max_poly=1, max_pole=1)
    f = ExactColemanFunction(calc, terms)
    return f if not f.is_zero() else _random_exact_function(rng, calc, max_len, nterms)


def _chain_triple(F, word, coeff, base):
    """``coeff * I_word`` as the chain connection ``(1, I_{w1}, I_{w1 w2}, ...)``."""
    M = UnipotentConnection.from_forms(F, [F.eta(a) for a in word])
    n = len(word) + 1
    s = [F.K.zero] * (n - 1) + [coeff]
    y = [1] + [0] * (n - 1)
    return AbstractColemanFunction(M, tuple(s), tuple(y), base)


def test_criterion_07_uniqueness_principle():
    rng = random.Random(707)
    p = 5
    eng = make_engine(p, base=4, max_len=4)
    F = FunctionField(p, eng.poles.prec)
    calc = ExactCalculus(F, eng.letters, eng.base)
    vanishing_ok, numeric_ok, nonzero_ok, nonzero_numeric = 0, 0, 0, 0
    for k in range(20):
        f = _random_exact_function(rng, calc)
        if k % 2:
            g = to_abstract(f) - to_abstract(f)
        else:
            # an independent representation of the same function: sum of chain triples
            pieces = [_chain_triple(F, w, c, eng.base) for w, c in f.terms.items()]
            total = pieces[0]
            for piece in pieces[1:]:
                total = total + piece
            g = total - to_abstract(f)
        if zero_test(g):
            vanishing_ok += 1
        # theta of f - f vanishes on one disc
        fe = f.to_engine(eng)
        z = random_point(rng, eng.poles, 2)
        d = eng.evaluate_theta(fe, z) - eng.evaluate_theta(fe, z)
        numeric_ok += _agreement(d, p) >= TOL
    for _ in range(20):
        f = _random_exact_function(rng, calc)
        if not zero_test(to_abstract(f)):
            nonzero_ok += 1
        fe = f.to_engine(eng)
        vals = [eng.evaluate_theta(fe, random_point(rng, eng.poles, 2)) for _ in range(3)]
        nonzero_numeric += any(_agreement(v, p) < TOL for v in vals)
    ok = vanishing_ok == 20 and numeric_ok == 20 and nonzero_ok == 20 and nonzero_numeric == 20
    record(7, ok, f"f - f: zero_test {vanishing_ok}/20, theta vanishes {numeric_ok}/20; "
                  f"nonzero f: zero_test false {nonzero_ok}/20, theta nonzero {nonzero_numeric}/20")
    assert ok


# 8 -------------------------------------------------------------------------------
def test_criterion_08_minimal_representative_uniqueness():
    rng = random.Random(808)
    p = 5
    F = FunctionField(p, 24)
    letters = (0, 1)
    calc = ExactCalculus(F, letters, 3)
    agree, ranks = 0, []
    for _ in range(10):
        u = tuple(rng.choice(letters) for _ in range(rng.randint(1, 2)))
        v = tuple(rng.choice(letters) for _ in range(rng.randint(1, 2)))
        g1, g2 = F.K.zero, F.K.zero
        while F.K.is_zero(g1) or F.K.is_zero(g2):
            g1 = random_field_element(rng, F, letters, 1, 1)
            g2 = random_field_element(rng, F, letters, 1, 1)
        # pipeline A: tensor product of two chain triples
        rep_a = _chain_triple(F, u, g1, 3) * _chain_triple(F, v, g2, 3)
        # pipeline B: shuffle expansion in normal form, then the word connection
        terms = {}
        for w, m in shuffle(u, v).items():
            terms[w] = F.const(m) * g1 * g2
        rep_b = to_abstract(ExactColemanFunction(calc, terms))
        _, ca = minimal_representative(rep_a, calc)
        _, cb = minimal_representative(rep_b, calc)
        agree += ca == cb
        ranks.append((rep_a.M.rank, rep_b.M.rank, ca.rank))
    ok = agree == 10 and all(r[2] > 0 for r in ranks)
    record(8, ok, f"canonical forms identical {agree}/10; (tensor rank, word rank, minimal rank) {ranks}")
    assert ok


# 9 -------------------------------------------------------------------------------
def test_criterion_09_dbar_and_cech():
    from unicol.dbar import (CechCover, DbarClass, dbar, dbar_extension, dbar_kernel_witness,
                             dbar_of_products, diagram_check, form_class)
    rng = random.Random(909)
    p = 5
    F = FunctionField(p, 24)
    letters = (0, 1)
    calc = ExactCalculus(F, letters, 3)

    # dbar(f I_a) = -[eta_a] (x) f through the extension recipe and the normal form
    product_ok = 0
    for _ in range(10):
        a = rng.choice(letters)
        f = random_field_element(rng, F, letters, 2, 1)
        expected = DbarClass.make(F, {a: -f})
        M = UnipotentConnection.from_forms(F, [F.eta(a)])
        triple = AbstractColemanFunction(M, (F.K.zero, f), (1, 0), 3)
        via_extension = dbar_extension(triple)
        via_normal_form = dbar(ExactColemanFunction(calc, {(a,): f}))
        product_ok += via_extension == expected and via_normal_form == expected

    # kernel: sum_j f_j int omega_j with cancelling classes equals an element of K
    kernel_ok = 0
    for _ in range(10):
        a = rng.choice(letters)
        f = random_field_element(rng, F, letters, 1, 1)
        h1 = random_field_element(rng, F, letters, 1, 2)
        h2 = random_field_element(rng, F, letters, 1, 2)
        pairs = [(F.eta(a) + F.diff(h1), f), (F.eta(a) + F.diff(h2), -f),
                 (F.diff(h2), random_field_element(rng, F, letters, 1, 1))]
        witness = dbar_kernel_witness(calc, pairs)
        # a pair with a surviving class has no witness
        broken = dbar_kernel_witness(calc, pairs[:1])
        kernel_ok += witness is not None and broken is None and dbar_of_products(calc, pairs).is_zero()

    # Cech square on three two-open covers
    poles = PoleSet(p, [0, 1, "inf"], prec=24)
    covers = [(2, 3, 4, 0), (2, 4, 3, 1), (3, 4, 2, 0)]
    diagram = []
    for s1, s2, b, r in covers:
        cover = CechCover(poles, s1, s2, b)
        h1 = random_field_element(rng, F, (s1,), 1, 2)
        h2 = random_field_element(rng, F, (s2,), 1, 2)
        f = random_field_element(rng, F, (), 2, 0) + 1
        eng = ColemanEngine(cover.restricted_poles("12"), b, max_word_length=2)
        pts = [random_point(rng, eng.poles, b) for _ in range(4)]
        rep = diagram_check(cover, r, h1, h2, f, eng, pts)
        diagram.append((rep["exact"], rep["agreement"]))
    diagram_ok = all(e and ag >= TOL for e, ag in diagram)
    ok = product_ok == 10 and kernel_ok == 10 and diagram_ok
    record(9, ok, f"dbar(f I_a) {product_ok}/10, kernel witnesses {kernel_ok}/10, "
                  f"Cech square (exact, digits) {diagram}")
    assert ok


# 10 ------------------------------------------------------------------------------
def test_criterion_10_two_variable_integrals():
    from unicol.twovar import check_two_variable
    t0 = time.perf_counter()
    df_min, diag_min, closed, count = 10 ** 9, 10 ** 9, True, 0
    for p in (5, 7):
        eng = make_engine(p, max_len=3)
        discs = [(r, s) for r in eng.poles.centers for s in eng.poles.centers][:4]
        for w in _words(eng.letters, 3):
            for rS, rz in discs:
                rep = check_two_variable(eng, w, rS, rz, 10)
                df_min = min(df_min, rep["df_dS"], rep["df_dz"])
                diag_min = min(diag_min, rep["diagonal"])
                closed = closed and rep["d_omega_exact"]
                count += 1
    elapsed = time.perf_counter() - t0
    ok = df_min >= 8 and closed and diag_min >= TOL and elapsed < 60
    record(10, ok, f"{count} (word, disc pair) cases: df = Omega to {df_min} digits, "
                   f"dOmega = 0 exactly: {closed}, f(S, S) = 0 to {diag_min} digits, {elapsed:.1f}s")
    assert ok


# 11 ------------------------------------------------------------------------------
def _residue_at_infinity_of_fraction(num, den):
    """``-`` the ``1/z`` coefficient of ``num/den`` at infinity, computed from the fraction alone."""
    from unicol import polynomial as poly
    _, rem = poly.divmod_poly(num, den)
    rem = poly.trim(rem)
    if len(rem) != len(den) - 1:
        return Fraction(0)
    return -Fraction(rem[-1]) / Fraction(den[-1])


def test_criterion_11_residue_theorem():
    from unicol import polynomial as poly
    rng = random.Random(1111)
    p = 5
    poles = PoleSet(p, [0, 1, 4, "inf"], prec=24)
    exact_ok, rational_ok = 0, 0
    # Mittag-Leffler forms with rational data: the sum is an exact rational zero
    for _ in range(25):
        w = OverconvergentForm(random_overconvergent(rng, poles, max_poly=3, max_pole=3))
        total = sum(w.residues().values(), Fraction(0))
        exact_ok += total == 0
    # rational forms with poles off the Teichmüller centers, inside the removed discs
    for _ in range(25):
        den = [Fraction(1)]
        for r in rng.sample([0, 1, 4], rng.randint(1, 3)):
            root = Fraction(poles.lift(r)) + p * rng.randint(-3, 3)
            for _ in range(rng.randint(1, 2)):
                den = poly.mul(den, [-root, Fraction(1)])
        num = [Fraction(rng.randint(-9, 9)) for _ in range(rng.randint(1, len(den) + 1))]
        if not poly.trim(num):
            num = [Fraction(1)]
        w = OverconvergentForm.from_rational(num, den, poles)
        finite = sum((w.residue(r) for r in poles.finite), Fraction(0))
        total = finite + _residue_at_infinity_of_fraction(num, den)
        rational_ok += total == 0 if not isinstance(total, PadicNumber) else total.is_zero()
    ok = exact_ok == 25 and rational_ok == 25
    record(11, ok, f"sum of residues vanishes: exact forms {exact_ok}/25, "
                   f"rational forms {rational_ok}/25 (residue at infinity from the fraction)")
    assert ok


# 12 ------------------------------------------------------------------------------
def test_criterion_12_precision_is_a_lower_bound():
    from unicol.engine import engine_precision
    rng = random.Random(1212)
    checks = []
    for p in (5, 7):
        lo = make_engine(p, max_len=3)
        doubled = engine_precision(12, 3) * 2 - engine_precision(0, 3)
        hi = make_engine(p, max_len=3, n_target=doubled)
        assert hi.poles.prec == 2 * lo.poles.prec
        for _ in range(10):
            w = tuple(rng.choice(lo.letters) for _ in range(rng.randint(1, 3)))
            z = random_point(rng, lo.poles)
            a = lo.evaluate_theta(lo.I(w), z)
            b = hi.evaluate_theta(hi.I(w), z)
            if isinstance(a, PadicNumber):
                reported, actual = a.prec, _agreement(a - b, p)
            else:
                reported, actual = "exact", ("exact" if a == b else 0)
            checks.append((p, w, reported, actual))
    bad = [c for c in checks if c[2] != "exact" and c[3] < c[2]
           or c[2] == "exact" and c[3] != "exact"]
    floor = min(c[2] for c in checks if c[2] != "exact")
    ok = len(checks) == 20 and not bad and floor >= 12
    record(12, ok, f"{len(checks)} spot checks against a {2 * make_engine(5, max_len=3).poles.prec}"
                   f"-digit rerun, violations {len(bad)}, least reported precision {floor}")
    assert ok
