from fractions import Fraction

import pytest

from unicol.engine import ColemanEngine, engine_precision
from unicol.overconvergent import OverconvergentFunction, PoleSet

ACCEPTANCE_RESULTS: dict = {}


def record(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_RESULTS[number] = line
    print(line)


_ENGINES: dict = {}


def make_engine(p, residues=(0, 1, "inf"), base=3, n_target=12, max_len=4, degree=None):
    key = (p, tuple(residues), base, n_target, max_len, degree)
    if key not in _ENGINES:
        poles = PoleSet(p, list(residues), prec=engine_precision(n_target, max_len))
        _ENGINES[key] = ColemanEngine(poles, base, degree=degree, max_word_length=max_len)
    return _ENGINES[key]


@pytest.fixture(scope="session")
def engine5():
    return make_engine(5)


@pytest.fixture(scope="session")
def engine7():
    return make_engine(7)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[n])


# -- random data shared by the suites ----------------------------------------------


def random_fraction(rng, p, num=9, den=4):
    """Small rational with denominator prime to ``p``."""
    while True:
        d = rng.randint(1, den)
        if d % p:
            return Fraction(rng.randint(-num, num), d)


def random_overconvergent(rng, poles, max_poly=2, max_pole=2):
    """Exact random function: polynomial plus principal parts at removed centers."""
    p = poles.p
    f = OverconvergentFunction.polynomial(
        poles, [random_fraction(rng, p) for _ in range(rng.randint(0, max_poly) + 1)])
    for a in poles.finite:
        for k in range(1, rng.randint(0, max_pole) + 1):
            c = random_fraction(rng, p)
            if c:
                f = f + OverconvergentFunction.pole_power(poles, a, k, c)
    return f


def random_point(rng, poles, r=None, spread=6):
    """Point ``c + p m`` in the disc of a center ``c`` of X."""
    if r is None:
        r = rng.choice(poles.centers)
    return poles.lift(r) + poles.p * rng.randrange(0, poles.p ** spread)


def random_field_element(rng, F, letters, max_poly=2, max_pole=2):
    """Exact random element of K with poles only at the given centers."""
    p = F.p
    e = F.K.zero
    for k in range(rng.randint(0, max_poly) + 1):
        e = e + F.const(random_fraction(rng, p)) * F.z ** k
    for a in letters:
        for k in range(1, rng.randint(0, max_pole) + 1):
            e = e + F.const(random_fraction(rng, p)) * F.eta(a) ** k
    return e
