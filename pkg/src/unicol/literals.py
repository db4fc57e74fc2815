"""Parser for function, form and point literals.

Grammar (whitespace ignored, juxtaposition means multiplication)::

    literal  := sum
    sum      := product (("+" | "-") product)*
    product  := unary (("*" | "/")? unary)*
    unary    := ("+" | "-") unary | power
    power    := atom (("^" | "**") integer)?
    atom     := integer | "z" | "dz" | "teich(" integer ")"
              | "poly(" sum ("," sum)* ")" | "L(" sum ")" | "(" sum ")"

``poly(c0, c1, ...)`` is ``c0 + c1 z + ...``; ``L(a)`` is the Frobenius
log-unit ``log((z^p - a)/(z - a)^p)`` for a removed Teichmüller point ``a``.
A form literal is linear in ``dz``: ``dz/(z-teich(2))``, ``poly(1,0,3)dz``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from . import polynomial as poly
from .overconvergent import OverconvergentForm, OverconvergentFunction, PoleSet
from .padic import PadicNumber, is_zero

_TOKEN = re.compile(r"\s*(?:(\d+)|(dz|z|teich|poly|L)|(\*\*|[-+*/^(),]))")


class LiteralError(ValueError):
    pass


def _tokenize(text: str):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise LiteralError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        num, word, op = m.groups()
        out.append(("num", int(num)) if num else ("word", word) if word else ("op", op))
        pos = m.end()
    return out


class _Value:
    """A rational function ``num/den`` or overconvergent data, times ``dz**dz``."""

    def __init__(self, num=None, den=None, ml=None, dz=0):
        self.num, self.den, self.ml, self.dz = num, den, ml, dz

    @property
    def is_rational(self):
        return self.ml is None

    def constant_value(self):
        if self.is_rational and self.dz == 0 and len(self.num) <= 1 and len(self.den) == 1:
            c = self.num[0] if self.num else Fraction(0)
            return c / self.den[0]
        return None


class _Parser:
    def __init__(self, text, poles: PoleSet | None, p: int | None, prec: int):
        self.toks = _tokenize(text)
        self.i = 0
        self.poles = poles
        self.p = poles.p if poles else p
        self.prec = prec

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (val is not None and tok[1] != val):
            raise LiteralError(f"expected {val or kind}, found {tok[1]!r}")
        self.i += 1
        return tok

    # -- grammar ----------------------------------------------------------
    def parse(self):
        v = self.sum()
        if self.i != len(self.toks):
            raise LiteralError(f"trailing input at token {self.peek()[1]!r}")
        return v

    def sum(self):
        v = self.product()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            w = self.product()
            v = self.add(v, w if op == "+" else self.neg(w))
        return v

    def product(self):
        v = self.unary()
        while True:
            tok = self.peek()
            if tok in (("op", "*"), ("op", "/")):
                self.take()
                w = self.unary()
                v = self.mul(v, w) if tok[1] == "*" else self.div(v, w)
            elif tok[0] in ("num", "word") or tok == ("op", "("):
                v = self.mul(v, self.unary())
            else:
                return v

    def unary(self):
        tok = self.peek()
        if tok == ("op", "-"):
            self.take()
            return self.neg(self.unary())
        if tok == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek() in (("op", "^"), ("op", "**")):
            self.take()
            n = self.take("num")[1]
            out = self.const(Fraction(1))
            for _ in range(n):
                out = self.mul(out, v)
            return out
        return v

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.const(Fraction(val))
        if kind == "op" and val == "(":
            v = self.sum()
            self.take("op", ")")
            return v
        if kind == "word":
            if val == "z":
                return _Value([Fraction(0), Fraction(1)], [Fraction(1)])
            if val == "dz":
                return _Value([Fraction(1)], [Fraction(1)], dz=1)
            self.take("op", "(")
            args = [self.sum()]
            while self.peek() == ("op", ","):
                self.take()
                args.append(self.sum())
            self.take("op", ")")
            return self.call(val, args)
        raise LiteralError(f"unexpected token {val!r}")

    def call(self, name, args):
        consts = [a.constant_value() for a in args]
        if name == "poly":
            if any(c is None for c in consts):
                raise LiteralError("poly() takes constant coefficients")
            return _Value(poly.trim(consts), [Fraction(1)])
        if len(args) != 1 or consts[0] is None:
            raise LiteralError(f"{name}() takes one constant argument")
        c = consts[0]
        if name == "teich":
            if self.p is None:
                raise LiteralError("teich() needs a prime")
            r = _residue(c, self.p)
            if self.poles is not None:
                return self.const(self.poles.lift(r))
            from .padic import teichmueller
            return self.const(teichmueller(r, self.p, self.prec))
        if name == "L":
            if self.poles is None:
                raise LiteralError("L() needs a pole set")
            r = _residue(c, self.p)
            return _Value(ml=OverconvergentFunction.frobenius_log(self.poles, r))
        raise LiteralError(f"unknown function {name}")

    # -- arithmetic on values ---------------------------------------------
    def const(self, c):
        return _Value([c] if not is_zero(c) else [], [Fraction(1)])

    def to_ml(self, v):
        if v.ml is not None:
            return v.ml
        if self.poles is None:
            raise LiteralError("non-constant literal needs a pole set")
        return OverconvergentFunction.from_rational(v.num, v.den, self.poles)

    def add(self, v, w):
        if v.dz != w.dz:
            raise LiteralError("cannot add a function and a form")
        if v.is_rational and w.is_rational:
            num = poly.add(poly.mul(v.num, w.den), poly.mul(w.num, v.den))
            return _Value(num, poly.mul(v.den, w.den), dz=v.dz)
        return _Value(ml=self.to_ml(v) + self.to_ml(w), dz=v.dz)

    def neg(self, v):
        if v.is_rational:
            return _Value(poly.neg(v.num), v.den, dz=v.dz)
        return _Value(ml=-v.ml, dz=v.dz)

    def mul(self, v, w):
        dz = v.dz + w.dz
        if dz > 1:
            raise LiteralError("dz appears more than once")
        if v.is_rational and w.is_rational:
            return _Value(poly.mul(v.num, w.num), poly.mul(v.den, w.den), dz=dz)
        return _Value(ml=self.to_ml(v) * self.to_ml(w), dz=dz)

    def div(self, v, w):
        if w.dz:
            raise LiteralError("cannot divide by dz")
        if not w.is_rational:
            raise LiteralError("division by a non-rational function")
        if not poly.trim(w.num):
            raise LiteralError("division by zero")
        if v.is_rational:
            return _Value(poly.mul(v.num, w.den), poly.mul(v.den, w.num), dz=v.dz)
        inv = OverconvergentFunction.from_rational(w.den, w.num, self.poles)
        return _Value(ml=v.ml * inv, dz=v.dz)


def _residue(c, p):
    if isinstance(c, PadicNumber):
        return c.residue()
    c = Fraction(c)
    return c.numerator * pow(c.denominator, -1, p) % p


def parse_function(text: str, poles: PoleSet) -> OverconvergentFunction:
    v = _Parser(text, poles, None, poles.prec).parse()
    if v.dz:
        raise LiteralError("expected a function, found a form")
    if v.ml is not None:
        return v.ml
    return OverconvergentFunction.from_rational(v.num, v.den, poles)


def parse_form(text: str, poles: PoleSet) -> OverconvergentForm:
    v = _Parser(text, poles, None, poles.prec).parse()
    if v.dz != 1:
        raise LiteralError("a form literal must contain dz exactly once")
    if v.ml is not None:
        return OverconvergentForm(v.ml)
    return OverconvergentForm.from_rational(v.num, v.den, poles)


def parse_rational(text: str, poles: PoleSet | None = None, p: int | None = None,
                   prec: int = 20):
    """``(num, den, dz_degree)`` for a literal without ``L``."""
    v = _Parser(text, poles, p, prec).parse()
    if v.ml is not None:
        raise LiteralError("literal is not rational")
    return v.num, v.den, v.dz


def parse_point(text: str, p: int, prec: int = 20, poles: PoleSet | None = None):
    """A constant such as ``teich(3)``, ``1+5`` or ``teich(2)+7/3``."""
    v = _Parser(text, poles, p, prec).parse()
    c = v.constant_value()
    if c is None:
        raise LiteralError("point literal must be constant")
    return c
