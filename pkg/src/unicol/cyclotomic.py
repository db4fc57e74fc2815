"""Rational functions over a cyclotomic field, kept in a form where every gcd is over Q.

An element of ``Q(zeta)(z)`` is stored as ``num / den`` with ``num`` in
``Q[t, z]`` reduced modulo the minimal polynomial of ``zeta`` (so of degree
below ``[Q(zeta) : Q]`` in ``t``) and ``den`` a monic polynomial in ``Q[z]``.
Inversion multiplies by the Galois conjugates of the numerator, whose product
(the norm) lies in ``Q[z]``.  The representation is canonical, so equality and
zero tests are structural.

sympy's own fraction field over an algebraic number field cancels through
gcds over that field, which is far slower and made row reduction of rank ten
connection matrices impractical.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd

import sympy as sp
from sympy.polys.rings import ring as poly_ring


class CyclotomicFunctionField:
    """``A(z)`` for ``A = Q(zeta)``, ``zeta`` a primitive ``m``-th root of unity (``A`` may be ``QQ``)."""

    def __init__(self, A, zeta, order: int, symbol="z"):
        self.A = A
        self.zeta_A = zeta
        self.order = order
        self.R, self.t, self.x = poly_ring(f"zeta_,{symbol}", sp.QQ, sp.lex)
        if A is sp.QQ:
            # zeta is rational (+1 or -1): the minimal polynomial is linear
            self.phi = self.t - self.R(sp.QQ(zeta))
            self.degree = 1
            self.conjugates = ()
        else:
            mod = [sp.QQ(c) for c in A.mod.to_list()]
            self.degree = len(mod) - 1
            self.phi = sum((c * self.t ** (self.degree - i) for i, c in enumerate(mod)), self.R.zero)
            self.conjugates = tuple(k for k in range(2, order) if gcd(k, order) == 1)
        self.A_ring, self.A_x = poly_ring(symbol, A, sp.lex)
        self._zeta_powers = [A.one]
        for _ in range(max(self.degree - 1, 0)):
            self._zeta_powers.append(self._zeta_powers[-1] * zeta)
        self.zero = CyclotomicFunction(self, self.R.zero, self.R.one)
        self.one = CyclotomicFunction(self, self.R.one, self.R.one)
        self.gen = CyclotomicFunction(self, self.x, self.R.one)

    # -- reduction ----------------------------------------------------------
    def _reduce(self, n):
        return n.rem(self.phi)

    def _conjugate(self, n, k):
        return self._reduce(n.compose(self.t, self.t ** k))

    def make(self, num, den) -> "CyclotomicFunction":
        """Normalize ``num / den`` (``den`` free of ``t`` and nonzero)."""
        num = self._reduce(num)
        if not num:
            return self.zero
        g = num.gcd(den)
        if g != self.R.one:
            num = num.exquo(g)
            den = den.exquo(g)
        lc = den.LC
        if lc != 1:
            num = num.quo_ground(lc)
            den = den.quo_ground(lc)
        return CyclotomicFunction(self, num, den)

    # -- conversions --------------------------------------------------------
    def _A_to_R(self, a):
        if self.A is sp.QQ:
            return self.R(sp.QQ(a))
        coeffs = a.to_list()
        d = len(coeffs) - 1
        return sum((sp.QQ(c) * self.t ** (d - i) for i, c in enumerate(coeffs)), self.R.zero)

    def convert_from(self, a, A=None) -> "CyclotomicFunction":
        return self.make(self._A_to_R(a), self.R.one)

    def from_rational(self, c) -> "CyclotomicFunction":
        c = Fraction(c)
        return self.make(self.R(sp.QQ(c.numerator, c.denominator)), self.R.one)

    def from_A_polys(self, n, d) -> "CyclotomicFunction":
        """``n / d`` for polynomials over ``A`` in the variable ``z``."""
        return self.make(self._Apoly_to_R(n), self.R.one) / self.make(self._Apoly_to_R(d), self.R.one)

    def _Apoly_to_R(self, pe):
        acc = self.R.zero
        for (k,), c in pe.terms():
            acc = acc + self._A_to_R(c) * self.x ** k
        return acc

    def _R_to_Apoly(self, n):
        acc = self.A_ring.zero
        for (i, k), c in n.terms():
            coef = self.A.convert(sp.Rational(int(c.numerator), int(c.denominator))) \
                if self.A is not sp.QQ else c
            acc = acc + self.A_ring(coef * self._zeta_powers[i]) * self.A_x ** k
        return acc

    def is_zero(self, e) -> bool:
        return not e.num


class CyclotomicFunction:
    __slots__ = ("K", "num", "den", "_numer", "_denom", "_reduced")

    def __init__(self, K, num, den):
        self.K = K
        self.num = num
        self.den = den
        self._numer = None
        self._denom = None
        self._reduced = None

    def _coerce(self, other):
        if isinstance(other, CyclotomicFunction):
            return other
        if isinstance(other, (int, Fraction)):
            return self.K.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return self.K.make(self.num + other.num, self.den)
        return self.K.make(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicFunction(self.K, -self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return self.K.zero
        return self.K.make(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero")
        K = self.K
        cof = K.R.one
        for k in K.conjugates:
            cof = K._reduce(cof * K._conjugate(self.num, k))
        norm = K._reduce(self.num * cof)
        if norm.degree(K.t) > 0:
            raise ArithmeticError("norm did not descend to Q[z]")
        return K.make(self.den * cof, norm)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = self.K.one, self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def derivative(self):
        x = self.K.x
        n, d = self.num, self.den
        return self.K.make(n.diff(x) * d - n * d.diff(x), d * d)

    @property
    def numer(self):
        """Numerator as a polynomial over ``A`` (the denominator is monic)."""
        if self._numer is None:
            self._numer = self.K._R_to_Apoly(self.num)
        return self._numer

    @property
    def denom(self):
        if self._denom is None:
            self._denom = self.K._R_to_Apoly(self.den)
        return self._denom

    @property
    def reduced(self):
        """``(numerator, denominator)`` over ``A`` in lowest terms, denominator monic.

        The stored denominator lies in ``Q[z]`` and so also vanishes at the
        conjugates of each pole; those removable factors are cancelled here.
        """
        if self._reduced is None:
            n, d = self.numer, self.denom
            if n and d.degree() > 0:
                g = n.gcd(d)
                if g.degree() > 0:
                    n, d = n.exquo(g), d.exquo(g)
                    lc = d.LC
                    n, d = n.quo_ground(lc), d.quo_ground(lc)
            self._reduced = (n, d)
        return self._reduced

    def __repr__(self):
        return f"({self.num})/({self.den})"
