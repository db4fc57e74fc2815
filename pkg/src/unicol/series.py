"""Truncated power series on residue discs and on products of two discs.

Coefficients are generic scalars: exact ``Fraction`` or :class:`PadicNumber`.
A series on the disc centred at ``c`` is written in the local parameter
``t = z - c``; at the chart at infinity the parameter is ``t = 1/z``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .padic import INF, PadicNumber, is_zero, to_padic, valuation

INFINITY_CHART = "inf"


class DomainError(ValueError):
    """A point outside the region where an expansion is guaranteed to converge."""


def _vlog(n: int, p: int) -> int:
    return int(math.floor(math.log(n, p) + 1e-9)) if n > 0 else 0


@dataclass(frozen=True)
class DiscSeries:
    """``sum(coeffs[n] * t**n for n <= degree)`` on the disc around ``center``.

    ``tail_val`` is a lower bound for the valuation of the discarded tail at
    any point with ``v(t) >= 1``.
    """

    p: int
    center: object
    coeffs: tuple
    tail_val: float = INF

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def from_list(cls, p, center, coeffs, degree=None, tail_val=None):
        coeffs = list(coeffs)
        if degree is not None:
            coeffs = (coeffs + [Fraction(0)] * (degree + 1))[: degree + 1]
        tv = degree + 1 if tail_val is None and degree is not None else tail_val
        return cls(p, center, tuple(coeffs), INF if tv is None else tv)

    @classmethod
    def constant(cls, p, center, value, degree):
        return cls.from_list(p, center, [value], degree, tail_val=INF)

    @classmethod
    def variable(cls, p, center, degree):
        return cls.from_list(p, center, [Fraction(0), Fraction(1)], degree, tail_val=INF)

    def _check(self, other: "DiscSeries"):
        if self.p != other.p:
            raise ValueError("prime mismatch")
        if not _same_center(self.center, other.center):
            raise ValueError("series centred at different discs")
        if self.degree != other.degree:
            raise ValueError("truncation degree mismatch")

    def __add__(self, other):
        if not isinstance(other, DiscSeries):
            return self + DiscSeries.constant(self.p, self.center, other, self.degree)
        self._check(other)
        return DiscSeries(self.p, self.center,
                          tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                          min(self.tail_val, other.tail_val))

    __radd__ = __add__

    def __neg__(self):
        return DiscSeries(self.p, self.center, tuple(-a for a in self.coeffs), self.tail_val)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "DiscSeries":
        vc = valuation(c, self.p)
        return DiscSeries(self.p, self.center, tuple(c * a for a in self.coeffs),
                          self.tail_val + vc if vc != INF else INF)

    def __mul__(self, other):
        if not isinstance(other, DiscSeries):
            return self.scale(other)
        self._check(other)
        D = self.degree
        a, b = self.coeffs, other.coeffs
        out = []
        for n in range(D + 1):
            acc = Fraction(0)
            for i in range(n + 1):
                if is_zero(a[i]) and not isinstance(a[i], PadicNumber):
                    continue
                acc = acc + a[i] * b[n - i]
            out.append(acc)
        tail = min(self.tail_val + other.min_val(), other.tail_val + self.min_val(),
                   D + 1 + min(self.min_coeff_val(), 0) + min(other.min_coeff_val(), 0))
        return DiscSeries(self.p, self.center, tuple(out), tail)

    __rmul__ = __mul__

    def min_coeff_val(self):
        vs = [valuation(a, self.p) for a in self.coeffs]
        return min(vs) if vs else INF

    def min_val(self):
        """Lower bound for v(f(t)) over v(t) >= 1."""
        best = INF
        for n, a in enumerate(self.coeffs):
            va = valuation(a, self.p)
            if va != INF:
                best = min(best, va + n)
        return min(best, self.tail_val)

    def derivative(self) -> "DiscSeries":
        D = self.degree
        out = [n * self.coeffs[n] for n in range(1, D + 1)] + [Fraction(0)]
        # top coefficient is unknown after differentiation
        return DiscSeries(self.p, self.center, tuple(out), min(self.tail_val, D) - 1)

    def formal_integral(self) -> "DiscSeries":
        """Antiderivative with zero constant term, truncated at the same degree."""
        D = self.degree
        out = [Fraction(0)] + [self.coeffs[n] / (n + 1) for n in range(D)]
        dropped = self.coeffs[D] / (D + 1)
        vd = valuation(dropped, self.p)
        tail = min(self.tail_val + 1 - _vlog(D + 2, self.p), vd + D + 1)
        return DiscSeries(self.p, self.center, tuple(out), tail)

    def truncate(self, degree: int) -> "DiscSeries":
        if degree >= self.degree:
            return self
        vs = [valuation(a, self.p) + n for n, a in enumerate(self.coeffs) if n > degree]
        return DiscSeries(self.p, self.center, self.coeffs[: degree + 1],
                          min([self.tail_val] + vs))

    def value_at_center(self):
        return self.coeffs[0]

    def evaluate(self, point, prec: int | None = None) -> PadicNumber:
        """Horner evaluation at a point ``z`` with ``v(z - c) >= 1``."""
        p = self.p
        if self.center == INFINITY_CHART:
            t = 1 / point
        else:
            t = point - self.center
        vt = valuation(t, p)
        if vt < 1:
            raise DomainError(f"point not inside the disc (v(t) = {vt})")
        return self.evaluate_local(t, prec)

    def evaluate_local(self, t, prec: int | None = None):
        p = self.p
        vt = valuation(t, p)
        acc = Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * t + a
        if prec is None:
            prec = _default_prec(self.coeffs, t)
        bound = self.tail_val + (vt - 1) * (self.degree + 1) if vt != INF else INF
        if isinstance(acc, PadicNumber) or bound != INF:
            acc = to_padic(acc, p, prec)
            if bound != INF:
                acc = acc.lift_precision(int(math.floor(bound)))
        return acc

    def coefficient_list(self):
        return list(self.coeffs)


def _same_center(a, b) -> bool:
    if a is b:
        return True
    if a == INFINITY_CHART or b == INFINITY_CHART:
        return a == b
    d = a - b
    return is_zero(d)


def _default_prec(coeffs, t) -> int:
    precs = [c.prec for c in coeffs if isinstance(c, PadicNumber)]
    if isinstance(t, PadicNumber):
        precs.append(t.prec)
    return max(precs) if precs else 64


@dataclass(frozen=True)
class BivariateSeries:
    """``sum(a[i][j] * s**i * t**j)`` with ``s = S - c_S`` and ``t = z - c_z``."""

    p: int
    centers: tuple
    coeffs: tuple  # tuple of rows, coeffs[i][j]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def zero(cls, p, centers, degree):
        row = tuple(Fraction(0) for _ in range(degree + 1))
        return cls(p, centers, tuple(row for _ in range(degree + 1)))

    @classmethod
    def outer(cls, f: DiscSeries, g: DiscSeries) -> "BivariateSeries":
        """The product ``f(S) * g(z)``."""
        if f.degree != g.degree:
            raise ValueError("degree mismatch")
        rows = tuple(tuple(a * b for b in g.coeffs) for a in f.coeffs)
        return cls(f.p, (f.center, g.center), rows)

    def _check(self, other):
        if self.degree != other.degree or self.p != other.p:
            raise ValueError("incompatible bivariate series")
        if not all(_same_center(a, b) for a, b in zip(self.centers, other.centers)):
            raise ValueError("centers differ")

    def __add__(self, other):
        self._check(other)
        return BivariateSeries(self.p, self.centers, tuple(
            tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return BivariateSeries(self.p, self.centers,
                               tuple(tuple(-a for a in r) for r in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return BivariateSeries(self.p, self.centers,
                               tuple(tuple(c * a for a in r) for r in self.coeffs))

    def __mul__(self, other):
        if not isinstance(other, BivariateSeries):
            return self.scale(other)
        self._check(other)
        D = self.degree
        A, B = self.coeffs, other.coeffs
        out = [[Fraction(0)] * (D + 1) for _ in range(D + 1)]
        for i1 in range(D + 1):
            for j1 in range(D + 1):
                a = A[i1][j1]
                if not isinstance(a, PadicNumber) and a == 0:
                    continue
                for i2 in range(D + 1 - i1):
                    row = B[i2]
                    orow = out[i1 + i2]
                    for j2 in range(D + 1 - j1):
                        orow[j1 + j2] = orow[j1 + j2] + a * row[j2]
        return BivariateSeries(self.p, self.centers, tuple(tuple(r) for r in out))

    def d_s(self) -> "BivariateSeries":
        D = self.degree
        rows = [tuple(i * a for a in self.coeffs[i]) for i in range(1, D + 1)]
        rows.append(tuple(Fraction(0) for _ in range(D + 1)))
        return BivariateSeries(self.p, self.centers, tuple(rows))

    def d_t(self) -> "BivariateSeries":
        D = self.degree
        rows = tuple(tuple(j * r[j] for j in range(1, D + 1)) + (Fraction(0),)
                     for r in self.coeffs)
        return BivariateSeries(self.p, self.centers, rows)

    def truncate(self, degree: int) -> "BivariateSeries":
        return BivariateSeries(self.p, self.centers,
                               tuple(tuple(r[: degree + 1]) for r in self.coeffs[: degree + 1]))

    def evaluate(self, S, z, prec: int | None = None):
        cs, cz = self.centers
        s, t = S - cs, z - cz
        if valuation(s, self.p) < 1 or valuation(t, self.p) < 1:
            raise DomainError("point outside the product disc")
        acc = Fraction(0)
        for row in reversed(self.coeffs):
            inner = Fraction(0)
            for a in reversed(row):
                inner = inner * t + a
            acc = acc * s + inner
        return acc

    def restrict_diagonal(self) -> DiscSeries:
        """``f(c + u, c + u)`` as a series in ``u``; requires equal centers."""
        if not _same_center(*self.centers):
            raise ValueError("diagonal restriction needs equal centers")
        D = self.degree
        out = [Fraction(0)] * (D + 1)
        for i in range(D + 1):
            for j in range(D + 1 - i):
                out[i + j] = out[i + j] + self.coeffs[i][j]
        return DiscSeries(self.p, self.centers[0], tuple(out), D + 1)

    def max_discrepancy_val(self, other, upto: int | None = None) -> float:
        """Minimum valuation of coefficient differences (INF when identical)."""
        D = self.degree if upto is None else upto
        best = INF
        for i in range(D + 1):
            for j in range(D + 1 - i if upto is not None else D + 1):
                d = self.coeffs[i][j] - other.coeffs[i][j]
                best = min(best, valuation(d, self.p))
        return best
