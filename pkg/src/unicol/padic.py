"""Bounded-precision arithmetic in Q_p.

A :class:`PadicNumber` stores ``p**v * u`` where ``u`` is a unit known modulo
``p**(prec - v)``; ``prec`` is the absolute precision, i.e. the value is known
modulo ``p**prec``.  Zero carries ``v = INF`` and still records ``prec``.

Exact rationals (``int`` and :class:`fractions.Fraction`) mix freely with
p-adic values; they are treated as having unbounded precision.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction

INF = math.inf


class PrecisionError(ArithmeticError):
    """Raised when a computation cannot reach the requested precision."""


def valuation_int(n: int, p: int) -> int | float:
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x, p: int) -> int | float:
    """Valuation of an int, Fraction or PadicNumber."""
    if isinstance(x, PadicNumber):
        return x.v
    x = Fraction(x)
    if x == 0:
        return INF
    return valuation_int(x.numerator, p) - valuation_int(x.denominator, p)


class PadicNumber:
    __slots__ = ("p", "v", "u", "prec")

    def __init__(self, p: int, v, u: int, prec: int):
        # callers guarantee normal form; use the constructors below otherwise
        self.p = p
        self.v = v
        self.u = u
        self.prec = prec

    # -- construction -----------------------------------------------------
    @classmethod
    def zero(cls, p: int, prec: int) -> "PadicNumber":
        return cls(p, INF, 0, prec)

    @classmethod
    def from_int(cls, n: int, p: int, prec: int, v_offset: int = 0) -> "PadicNumber":
        """The number ``n * p**v_offset`` known modulo ``p**prec``."""
        rel = prec - v_offset
        if rel <= 0:
            return cls.zero(p, prec)
        n %= p**rel
        if n == 0:
            return cls.zero(p, prec)
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return cls(p, v + v_offset, n % p ** (prec - v - v_offset), prec)

    @classmethod
    def from_rational(cls, x, p: int, prec: int) -> "PadicNumber":
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, prec)
        num, den = x.numerator, x.denominator
        vn, vd = valuation_int(num, p), valuation_int(den, p)
        num //= p**vn
        den //= p**vd
        v = vn - vd
        rel = prec - v
        if rel <= 0:
            return cls.zero(p, prec)
        mod = p**rel
        return cls(p, v, num * pow(den, -1, mod) % mod, prec)

    @classmethod
    def coerce(cls, x, p: int, prec: int) -> "PadicNumber":
        if isinstance(x, PadicNumber):
            if x.p != p:
                raise ValueError(f"prime mismatch: {x.p} vs {p}")
            return x
        return cls.from_rational(x, p, prec)

    # -- basic properties -------------------------------------------------
    @property
    def relprec(self) -> int:
        return 0 if self.v == INF else self.prec - self.v

    def is_zero(self) -> bool:
        return self.v == INF

    def to_int(self) -> int:
        """Integer representative modulo ``p**prec`` (requires v >= 0)."""
        if self.v == INF:
            return 0
        if self.v < 0:
            raise ValueError("not integral")
        return self.u * self.p**self.v % self.p**self.prec

    def to_fraction(self) -> Fraction:
        if self.v == INF:
            return Fraction(0)
        return Fraction(self.u) * Fraction(self.p) ** self.v

    def digits(self) -> list[int]:
        out, u = [], self.u
        for _ in range(self.relprec):
            out.append(u % self.p)
            u //= self.p
        return out

    def residue(self) -> int:
        """Reduction mod p of an integral number."""
        if self.v == INF or self.v > 0:
            return 0
        if self.v < 0:
            raise ValueError("not integral")
        return self.u % self.p

    def lift_precision(self, prec: int) -> "PadicNumber":
        """Reduce (never raise) the recorded precision."""
        if prec >= self.prec:
            return self
        if self.v == INF or self.v >= prec:
            return PadicNumber.zero(self.p, prec)
        return PadicNumber(self.p, self.v, self.u % self.p ** (prec - self.v), prec)

    # -- arithmetic -------------------------------------------------------
    def _other(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError(f"prime mismatch: {self.p} vs {other.p}")
            return other
        if isinstance(other, (int, Fraction)):
            x = Fraction(other)
            vx = valuation(x, self.p)
            extra = 0 if vx == INF else abs(vx)
            sv = 0 if self.v == INF else abs(self.v)
            return PadicNumber.from_rational(x, self.p, abs(self.prec) + sv + extra + 2)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        p = self.p
        prec = min(self.prec, o.prec)
        if self.v == INF:
            return o.lift_precision(prec)
        if o.v == INF:
            return self.lift_precision(prec)
        m = min(self.v, o.v)
        rel = prec - m
        if rel <= 0:
            return PadicNumber.zero(p, prec)
        mod = p**rel
        x = (self.u * p ** (self.v - m) + o.u * p ** (o.v - m)) % mod
        if x == 0:
            return PadicNumber.zero(p, prec)
        while x % p == 0:
            x //= p
            m += 1
        return PadicNumber(p, m, x, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.v == INF:
            return self
        return PadicNumber(self.p, self.v, (-self.u) % self.p ** (self.prec - self.v), self.prec)

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        p = self.p
        if self.v == INF or o.v == INF:
            va = self.prec if self.v == INF else self.v
            vb = o.prec if o.v == INF else o.v
            return PadicNumber.zero(p, min(self.prec + vb, o.prec + va))
        v = self.v + o.v
        prec = min(self.prec + o.v, o.prec + self.v)
        return PadicNumber(p, v, self.u * o.u % p ** (prec - v), prec)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.v == INF:
            raise ZeroDivisionError("p-adic division by zero")
        rel = self.prec - self.v
        mod = self.p**rel
        return PadicNumber(self.p, -self.v, pow(self.u, -1, mod), rel - self.v)

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        if o.v == INF:
            raise ZeroDivisionError("p-adic division by zero")
        if self.v == INF:
            return PadicNumber.zero(self.p, self.prec - o.v)
        rel = min(self.relprec, o.relprec)
        mod = self.p**rel
        u = self.u * pow(o.u, -1, mod) % mod
        v = self.v - o.v
        return PadicNumber(self.p, v, u, v + rel)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return PadicNumber.from_int(1, self.p, self.relprec if self.v != INF else self.prec)
        if self.v == INF:
            return PadicNumber.zero(self.p, self.prec + (n - 1) * self.prec)
        rel = self.relprec
        return PadicNumber(self.p, n * self.v, pow(self.u, n, self.p**rel), n * self.v + rel)

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return (self - o).v == INF

    __hash__ = None

    def __repr__(self):
        if self.v == INF:
            return f"O({self.p}^{self.prec})"
        return f"{self.u}*{self.p}^{self.v} + O({self.p}^{self.prec})"

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "p": self.p,
            "v": "inf" if self.v == INF else self.v,
            "digits": self.digits(),
            "prec": self.prec,
        }

    @classmethod
    def from_json(cls, obj) -> "PadicNumber":
        if isinstance(obj, str):
            obj = json.loads(obj)
        p, prec = int(obj["p"]), int(obj["prec"])
        if obj["v"] == "inf":
            return cls.zero(p, prec)
        v = int(obj["v"])
        digits = obj["digits"]
        if len(digits) != prec - v or not digits or digits[0] == 0:
            raise ValueError("malformed p-adic literal")
        u = sum(d * p**i for i, d in enumerate(digits))
        return cls(p, v, u, prec)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def is_zero(x) -> bool:
    if isinstance(x, PadicNumber):
        return x.v == INF
    return x == 0


def to_padic(x, p: int, prec: int) -> PadicNumber:
    return PadicNumber.coerce(x, p, prec)


def teichmueller(a: int, p: int, prec: int):
    """Teichmüller lift of the residue class ``a``.

    Returns an exact integer for the classes 0, 1 and -1 (whose lifts are
    rational) and a :class:`PadicNumber` otherwise.
    """
    a %= p
    if a in (0, 1):
        return Fraction(a)
    if a == p - 1:
        return Fraction(-1)
    mod = p**prec
    x = a
    while True:
        y = pow(x, p, mod)
        if y == x:
            break
        x = y
    return PadicNumber(p, 0, x, prec)


def teichmueller_padic(a: int, p: int, prec: int) -> PadicNumber:
    return to_padic(teichmueller(a, p, prec), p, prec)


def log_unit(u, p: int, prec: int | None = None) -> PadicNumber:
    """Iwasawa logarithm of a p-adic unit, ``log(u**(p-1)) / (p-1)``."""
    if prec is None:
        if not isinstance(u, PadicNumber):
            raise ValueError("precision required for exact input")
        prec = u.prec
    u = to_padic(u, p, prec)
    if u.v != 0:
        raise ValueError("log_unit requires a unit")
    prec = min(prec, u.prec)
    # x = u^(p-1) - 1 has valuation >= 1 (>= 2 needed for p = 2 squares)
    e = p - 1 if p > 2 else 2
    x = u**e - 1
    x = x.lift_precision(prec)
    if x.v == INF:
        return PadicNumber.zero(p, prec)
    s = x.v
    # work with integers: X = x mod p^M, terms X^n / n
    guard = int(math.log(max(2, prec), p)) + 3
    work = prec + guard
    X = x.to_int() % p**work
    total = PadicNumber.zero(p, work)
    term = 1
    n = 0
    while True:
        n += 1
        term = term * X % p**work
        if n * s - math.log(n, p) >= prec + 1 and n > 1:
            break
        t = PadicNumber.from_int(term, p, work) / n
        total = total + t if n % 2 else total - t
    return (total / e).lift_precision(prec)


def padic_from_digits(p: int, digits: list[int], v: int = 0) -> PadicNumber:
    u = sum(d * p**i for i, d in enumerate(digits))
    return PadicNumber.from_int(u, p, v + len(digits), v)
