"""Coleman functions in iterated-integral normal form.

A Coleman function is a finite sum ``sum_w g_w * I_w`` where ``g_w`` are
overconvergent functions and ``I_w`` is the iterated integral

    I_w(z) = int_b^z eta_{a_1} o ... o eta_{a_m},   eta_a = dz/(z - a),

normalized by ``I_w(b) = 0`` for nonempty ``w`` and ``I_() = 1``; so
``dI_w = I_{w[:-1]} eta_{w[-1]}``.  Words are tuples of residue classes of the
removed finite discs; the base point ``b`` is a Teichmüller center of ``X``.

Constants ``I_w(c)`` at the other Teichmüller centers come from Frobenius:
``phi*I_w = p**|w| I_w + (lower words with overconvergent coefficients)`` and
``phi(c) = c`` give ``(1 - p**|w|) I_w(c) = sum_{v != w} G_{w,v}(c) I_v(c)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

from .overconvergent import (INFINITY, OverconvergentForm, OverconvergentFunction, PoleSet,
                             _floor_log)
from .padic import INF, PadicNumber, PrecisionError, is_zero, to_padic, valuation
from .series import DiscSeries, DomainError

ZERO = Fraction(0)
ONE = Fraction(1)


def shuffle(u: tuple, v: tuple) -> dict:
    """Shuffles of ``u`` and ``v`` with multiplicities."""
    out: dict = {}

    def rec(i, j, acc):
        if i == len(u) and j == len(v):
            w = tuple(acc)
            out[w] = out.get(w, 0) + 1
            return
        if i < len(u):
            rec(i + 1, j, acc + [u[i]])
        if j < len(v):
            rec(i, j + 1, acc + [v[j]])

    rec(0, 0, [])
    return out


def word_key(w: tuple):
    return (len(w), w)


def _prec_of(x) -> float:
    return x.prec if isinstance(x, PadicNumber) else INF


@dataclass(frozen=True, eq=False)
class ColemanFunction:
    """``sum_w terms[w] * I_w`` on the space of ``engine``."""

    engine: "ColemanEngine"
    terms: dict = field(default_factory=dict)

    @classmethod
    def make(cls, engine, terms: dict) -> "ColemanFunction":
        clean = {}
        for w in sorted(terms, key=word_key):
            g = terms[w]
            if not isinstance(g, OverconvergentFunction):
                g = OverconvergentFunction.constant(engine.poles, g)
            if not g.is_zero():
                clean[tuple(w)] = g
        return cls(engine, clean)

    @property
    def poles(self) -> PoleSet:
        return self.engine.poles

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        other = self.engine.coerce(other)
        terms = dict(self.terms)
        for w, g in other.terms.items():
            terms[w] = terms[w] + g if w in terms else g
        return ColemanFunction.make(self.engine, terms)

    __radd__ = __add__

    def __neg__(self):
        return ColemanFunction(self.engine, {w: -g for w, g in self.terms.items()})

    def __sub__(self, other):
        return self + (-self.engine.coerce(other))

    def __rsub__(self, other):
        return self.engine.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, ColemanFunction):
            return self.shuffle_product(other)
        if isinstance(other, OverconvergentFunction):
            return ColemanFunction.make(self.engine, {w: g * other for w, g in self.terms.items()})
        return ColemanFunction.make(self.engine, {w: g.scale(other) for w, g in self.terms.items()})

    __rmul__ = __mul__

    def shuffle_product(self, other: "ColemanFunction") -> "ColemanFunction":
        terms: dict = {}
        for u, g in self.terms.items():
            for v, h in other.terms.items():
                gh = g * h
                for w, mult in shuffle(u, v).items():
                    add = gh.scale(Fraction(mult)) if mult != 1 else gh
                    terms[w] = terms[w] + add if w in terms else add
        return ColemanFunction.make(self.engine, terms)

    def d(self) -> "ColemanForm":
        """``d(g I_w) = dg I_w + g I_{w[:-1]} eta_{w[-1]}``."""
        eng = self.engine
        terms: dict = {}
        for w, g in self.terms.items():
            dg = g.derivative()
            terms[w] = terms[w] + dg if w in terms else dg
            if w:
                part = g * eng.eta_coeff(w[-1])
                v = w[:-1]
                terms[v] = terms[v] + part if v in terms else part
        return ColemanForm.make(eng, terms)

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    def evaluate(self, z):
        return self.engine.evaluate_theta(self, z)

    def pullback(self) -> "ColemanFunction":
        """Frobenius pullback ``f(z**p)`` in normal form."""
        eng = self.engine
        out = ColemanFunction.make(eng, {})
        for w, g in self.terms.items():
            out = out + eng.pullback_word(w) * g.pullback()
        return out

    def expand_at(self, r, degree: int | None = None) -> DiscSeries:
        """Local expansion on the disc of ``X`` with residue class ``r``."""
        eng = self.engine
        D = eng.degree if degree is None else degree
        acc = None
        for w, g in self.terms.items():
            term = g.expand_at(r, D) * eng.local_expansion(w, r, D)
            acc = term if acc is None else acc + term
        if acc is None:
            return DiscSeries.from_list(eng.p, eng.poles.lift(r), [], D, tail_val=INF)
        return acc

    def __repr__(self):
        inner = ", ".join(f"{list(w)}: {g!r}" for w, g in self.terms.items())
        return f"ColemanFunction({{{inner}}})"


@dataclass(frozen=True, eq=False)
class ColemanForm:
    """``sum_w terms[w] * I_w dz``."""

    engine: "ColemanEngine"
    terms: dict = field(default_factory=dict)

    @classmethod
    def make(cls, engine, terms: dict) -> "ColemanForm":
        clean = {}
        for w in sorted(terms, key=word_key):
            g = terms[w]
            if isinstance(g, OverconvergentForm):
                g = g.coeff
            if not g.is_zero():
                clean[tuple(w)] = g
        return cls(engine, clean)

    @classmethod
    def from_form(cls, engine, form: OverconvergentForm, word: tuple = ()) -> "ColemanForm":
        return cls.make(engine, {tuple(word): form.coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        terms = dict(self.terms)
        for w, g in other.terms.items():
            terms[w] = terms[w] + g if w in terms else g
        return ColemanForm.make(self.engine, terms)

    def __neg__(self):
        return ColemanForm(self.engine, {w: -g for w, g in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return ColemanForm.make(self.engine, {w: g.scale(c) for w, g in self.terms.items()})

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def expand_at(self, r, degree: int | None = None) -> DiscSeries:
        """Local expansion of the ``dz`` coefficient."""
        eng = self.engine
        D = eng.degree if degree is None else degree
        acc = DiscSeries.from_list(eng.p, eng.poles.lift(r), [], D, tail_val=INF)
        for w, g in self.terms.items():
            acc = acc + g.expand_at(r, D) * eng.local_expansion(w, r, D)
        return acc

    def __repr__(self):
        inner = ", ".join(f"{list(w)}: {g!r}" for w, g in self.terms.items())
        return f"ColemanForm({{{inner}}} dz)"


class ColemanEngine:
    """Iterated integrals on ``X`` based at the Teichmüller center of class ``base``.

    ``degree`` is the truncation degree of local expansions on residue discs.
    """

    def __init__(self, poles: PoleSet, base: int, degree: int | None = None,
                 max_word_length: int = 4):
        self.poles = poles
        self.p = poles.p
        self.base = base % self.p
        if self.base in poles.finite:
            raise DomainError("base point must lie in a disc of X")
        self.b = poles.lift(self.base)
        self.degree = degree if degree is not None else poles.series_degree
        self.max_word_length = max_word_length
        self._eta = {}
        self._frob_eta = {}
        self._pullbacks = {(): None}
        self._values = {}
        self._local = {}

    # -- building blocks ------------------------------------------------------
    @property
    def letters(self) -> tuple:
        return self.poles.finite

    def words(self, max_length: int | None = None):
        L = self.max_word_length if max_length is None else max_length
        out = [()]
        for m in range(1, L + 1):
            out.extend(iproduct(self.letters, repeat=m))
        return out

    def eta_coeff(self, a) -> OverconvergentFunction:
        if a not in self._eta:
            if a not in self.poles.finite:
                raise DomainError(f"{a} is not a removed finite disc")
            self._eta[a] = OverconvergentFunction.pole_power(self.poles, a, 1)
        return self._eta[a]

    def eta(self, a) -> OverconvergentForm:
        return OverconvergentForm(self.eta_coeff(a))

    def frobenius_log(self, a) -> OverconvergentFunction:
        return OverconvergentFunction.frobenius_log(self.poles, a)

    def frobenius_eta_coeff(self, a) -> OverconvergentFunction:
        """Coefficient of ``phi*eta_a = p eta_a + dL_a``."""
        if a not in self._frob_eta:
            self._frob_eta[a] = (self.eta_coeff(a).scale(Fraction(self.p))
                                 + self.frobenius_log(a).derivative())
        return self._frob_eta[a]

    def coerce(self, x) -> ColemanFunction:
        if isinstance(x, ColemanFunction):
            if x.engine is not self:
                raise ValueError("Coleman functions from different engines")
            return x
        if isinstance(x, OverconvergentFunction):
            return ColemanFunction.make(self, {(): x})
        return ColemanFunction.make(self, {(): OverconvergentFunction.constant(self.poles, x)})

    def one(self) -> ColemanFunction:
        return self.coerce(ONE)

    def I(self, word) -> ColemanFunction:
        word = tuple(a % self.p for a in word)
        for a in word:
            self.eta_coeff(a)
        return ColemanFunction.make(self, {word: ONE})

    # -- primitive ------------------------------------------------------------
    def coleman_primitive(self, omega, value=ZERO, at=None) -> ColemanFunction:
        """The Coleman function ``F`` with ``dF = omega`` and ``F(at) = value``.

        ``at`` defaults to the base point.  Each term ``f I_w dz`` is reduced as
        ``f dz = sum_a c_a eta_a + dg``; it contributes ``sum_a c_a I_{w+(a,)} + g I_w``
        and leaves the correction ``-g eta_{w[-1]} I_{w[:-1]} dz`` for shorter words.
        """
        if isinstance(omega, OverconvergentForm):
            omega = ColemanForm.from_form(self, omega)
        work = {w: g for w, g in omega.terms.items()}
        result: dict = {}

        def acc(w, g):
            result[w] = result[w] + g if w in result else g

        while work:
            w = max(work, key=word_key)
            f = work.pop(w)
            coeffs, g = OverconvergentForm(f).reduce()
            for a, c in coeffs.items():
                acc(w + (a,), OverconvergentFunction.constant(self.poles, c))
            if g.is_zero():
                continue
            acc(w, g)
            if w:
                corr = -(g * self.eta_coeff(w[-1]))
                v = w[:-1]
                work[v] = work[v] + corr if v in work else corr
        F = ColemanFunction.make(self, result)
        if at is None:
            current = F.terms[()].evaluate(self.b) if () in F.terms else ZERO
        else:
            current = self.evaluate_theta(F, at)
        return F + (value - current)

    # -- Frobenius structure --------------------------------------------------
    def pullback_word(self, w) -> ColemanFunction:
        """``phi*I_w`` in normal form, vanishing at the base point."""
        w = tuple(w)
        if w == ():
            return self.one()
        if w not in self._pullbacks:
            prev = self.pullback_word(w[:-1])
            integrand = ColemanForm.make(
                self, {v: g * self.frobenius_eta_coeff(w[-1]) for v, g in prev.terms.items()})
            self._pullbacks[w] = self.coleman_primitive(integrand)
        return self._pullbacks[w]

    def center_value(self, w, r):
        """``I_w(c)`` at the Teichmüller center of class ``r``."""
        w = tuple(w)
        r %= self.p
        if w == ():
            return ONE
        if r == self.base:
            return ZERO
        if r in self.poles.finite:
            raise DomainError(f"{r} is a removed disc")
        key = (w, r)
        if key not in self._values:
            m = len(w)
            phi = self.pullback_word(w)
            c = self.poles.lift(r)
            lead = phi.terms.get(w)
            pm = Fraction(self.p) ** m
            if lead is None or not (lead - pm).is_zero():
                raise PrecisionError(f"leading Frobenius coefficient of {w} is not p^{m}")
            rhs = ZERO
            for v, g in phi.terms.items():
                if v == w:
                    continue
                if len(v) >= m:
                    raise PrecisionError("unexpected word in Frobenius pullback")
                cv = self.center_value(v, r)
                if is_zero(cv) and not isinstance(cv, PadicNumber):
                    continue
                rhs = rhs + g.evaluate(c) * cv
            val = rhs / (1 - pm)
            if not isinstance(val, PadicNumber):
                val = to_padic(val, self.p, self.poles.prec)
            self._values[key] = val
        return self._values[key]

    def solve_center_values(self, words=None) -> dict:
        """Table ``(word, residue class) -> I_w(c)`` for all centers of ``X``."""
        words = self.words() if words is None else [tuple(w) for w in words]
        out = {}
        for w in sorted(words, key=word_key):
            for r in self.poles.centers:
                out[(w, r)] = self.center_value(w, r)
        return out

    # -- local expansions and evaluation --------------------------------------
    def local_expansion(self, w, r, degree: int | None = None) -> DiscSeries:
        """``I_w`` on the disc of class ``r`` in ``t = z - c``."""
        w = tuple(w)
        r %= self.p
        D = self.degree if degree is None else degree
        key = (w, r, D)
        if key not in self._local:
            c = self.poles.lift(r)
            if w == ():
                s = DiscSeries.constant(self.p, c, ONE, D)
            else:
                prev = self.local_expansion(w[:-1], r, D)
                integrand = prev * self.eta_coeff(w[-1]).expand_at(r, D)
                s = integrand.formal_integral() + self.center_value(w, r)
            self._local[key] = s
        return self._local[key]

    def evaluate_theta(self, f, z):
        """Value of a Coleman function at a point of ``X``."""
        f = self.coerce(f)
        r = self.poles.check_in_X(z)
        acc = ZERO
        for w, g in f.terms.items():
            gz = g.evaluate(z)
            if w == ():
                acc = acc + gz
            else:
                acc = acc + gz * self.local_expansion(w, r).evaluate(z)
        return acc

    def frobenius_equivariance_check(self, f, points) -> dict:
        """Compare ``f(z**p)`` with the normal form of ``phi*f`` evaluated at ``z``."""
        f = self.coerce(f)
        pf = f.pullback()
        worst, rows = INF, []
        for z in points:
            lhs = self.evaluate_theta(f, z**self.p)
            rhs = self.evaluate_theta(pf, z)
            d = lhs - rhs
            agree = _agreement(d, self.p)
            worst = min(worst, agree)
            rows.append({"point": z, "agreement": agree})
        return {"min_agreement": worst, "points": rows}

    def value_precision(self, x) -> float:
        return _prec_of(x)


def _agreement(d, p) -> float:
    """Digits of agreement certified by a difference ``d``."""
    if isinstance(d, PadicNumber):
        return d.prec if d.is_zero() else d.v
    return valuation(d, p)


def log_closed_form(engine: ColemanEngine, a, z):
    """``I_(a)(z) = log_unit((z - a)/(b - a))`` for a removed finite disc ``a``."""
    from .padic import log_unit
    av = engine.poles.lift(a)
    return log_unit((z - av) / (engine.b - av), engine.p, engine.poles.prec)


def engine_precision(n_target: int, max_word_length: int) -> int:
    """Working precision for ``n_target`` digits on words up to ``max_word_length``.

    Each word-length layer of the Frobenius solve loses about two digits in the
    cohomology reduction; four guard digits cover the point evaluation.
    """
    return n_target + 2 * max_word_length + 4
