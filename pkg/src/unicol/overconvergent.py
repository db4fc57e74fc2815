"""Overconvergent functions and 1-forms on P^1 minus Teichmüller residue discs.

Every function regular on the union ``X`` of the residue discs that are not
removed is stored in Mittag-Leffler form::

    f(z) = P(z) + sum_a sum_{k >= 1} c_{a,k} * (z - a)**(-k)

with ``P`` a polynomial (the pole at infinity lives in the removed disc at
infinity) and one tail per removed finite disc ``a`` (a Teichmüller point).
The decomposition is unique, so equality is coefficientwise.  Rational
functions have finite tails; the Frobenius log-units ``L_a`` have infinite
ones, truncated at ``PoleSet.kmax`` with the dropped part's valuation kept in
``trunc``.  ``trunc`` bounds the error of the stored data in sup norm over
``X`` (the Gauss norm of a Mittag-Leffler sum is the minimum coefficient
valuation).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import polynomial as poly
from .padic import INF, PadicNumber, is_zero, log_unit, teichmueller, to_padic, valuation
from .series import DiscSeries, DomainError

INFINITY = "inf"
ZERO = Fraction(0)
ONE = Fraction(1)


def _floor_log(n: int, p: int) -> int:
    k = 0
    while n >= p:
        n //= p
        k += 1
    return k


def working_precision(p: int, n_target: int, series_degree: int) -> int:
    """Target precision plus the digits lost to formal integration plus two guard digits."""
    return n_target + _floor_log(series_degree + 1, p) + 2


class PoleSet:
    """The removed residue discs: finite residue classes plus the disc at infinity.

    The disc at infinity is always removed (the ring of functions is built
    from polynomials and principal parts at finite poles); listing ``inf``
    explicitly is accepted and has no further effect.
    """

    def __init__(self, p: int, residues, prec: int = 16, kmax: int | None = None,
                 series_degree: int | None = None):
        if p < 3 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError("p must be an odd prime")
        res = set()
        for r in residues:
            if r == INFINITY:
                continue
            res.add(int(r) % p)
        self.p = p
        self.finite = tuple(sorted(res))
        if len(self.finite) >= p:
            raise ValueError("the complement must keep at least one residue disc")
        self.prec = prec
        self.kmax = kmax if kmax is not None else (p - 1) * (prec + _floor_log(prec, p) + 3)
        self.series_degree = series_degree if series_degree is not None else 64
        self._lifts = {}

    @classmethod
    def parse(cls, tokens, p: int, **kw) -> "PoleSet":
        """Build from tokens such as ``["0", "1", "inf"]`` or ``"0,1,inf"``; ``teich(n)`` is accepted."""
        if isinstance(tokens, str):
            tokens = [t for t in tokens.strip("{}[] ").split(",") if t.strip()]
        out = []
        for t in tokens:
            t = str(t).strip().replace(" ", "")
            if t in ("inf", "oo", "infinity", "∞"):
                out.append(INFINITY)
            elif t.startswith("teich(") and t.endswith(")"):
                out.append(int(t[6:-1]))
            else:
                out.append(int(t))
        return cls(p, out, **kw)

    def key(self) -> tuple:
        return (self.p, self.finite, self.prec, self.kmax)

    def __eq__(self, other):
        return isinstance(other, PoleSet) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"PoleSet(p={self.p}, poles={list(self.finite) + ['inf']}, prec={self.prec})"

    def with_poles(self, extra) -> "PoleSet":
        return PoleSet(self.p, list(self.finite) + list(extra), self.prec, self.kmax,
                       self.series_degree)

    def lift(self, r: int):
        """Teichmüller point of the residue class ``r``."""
        r %= self.p
        if r not in self._lifts:
            self._lifts[r] = teichmueller(r, self.p, self.prec + 4)
        return self._lifts[r]

    @property
    def centers(self) -> tuple:
        """Residue classes of the discs of ``X``."""
        return tuple(r for r in range(self.p) if r not in self.finite)

    def residue_class(self, z) -> int | str:
        v = valuation(z, self.p)
        if v < 0:
            return INFINITY
        if isinstance(z, PadicNumber):
            return z.residue()
        z = Fraction(z)
        return z.numerator * pow(z.denominator, -1, self.p) % self.p

    def check_in_X(self, z) -> int:
        r = self.residue_class(z)
        if r == INFINITY or r in self.finite:
            raise DomainError(f"point lies in a removed disc ({r})")
        return r


# -- series kernels -----------------------------------------------------------

def _reciprocal_shift(g, dinv, M):
    """First ``M`` coefficients of ``g(s) / (d + s)`` given ``dinv = 1/d``."""
    out = []
    prev = ZERO
    for m in range(M):
        gm = g[m] if m < len(g) else ZERO
        prev = (gm - prev) * dinv
        out.append(prev)
    return out


def tail_taylor(c, d, M):
    """Coefficients in ``s`` of ``sum_k c[k-1] * (d + s)**(-k)`` up to ``s**(M-1)``."""
    dinv = 1 / d
    h = []
    for k in range(len(c), 0, -1):
        g = list(h) if h else [ZERO]
        g[0] = g[0] + c[k - 1]
        h = _reciprocal_shift(g, dinv, M)
    return h if h else [ZERO] * M


def _vmin(seq, p):
    best = INF
    for x in seq:
        vx = valuation(x, p)
        if vx < best:
            best = vx
    return best


# -- functions ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OverconvergentFunction:
    """Mittag-Leffler data: ``poly`` (low degree first) and ``tails[r]`` = (c_1, c_2, ...)."""

    poles: PoleSet
    poly: tuple = ()
    tails: dict = field(default_factory=dict)
    trunc: float = INF

    # -- construction -------------------------------------------------------
    @classmethod
    def make(cls, poles, poly_coeffs, tails, trunc=INF) -> "OverconvergentFunction":
        """Normalize: cap tail length, fix precision, trim trailing zeros."""
        p, cap, kmax = poles.p, poles.prec, poles.kmax
        new_tails = {}
        for r, t in tails.items():
            t = list(t)
            if len(t) > kmax:
                trunc = min(trunc, _vmin(t[kmax:], p))
                t = t[:kmax]
            new_tails[r] = t
        pc = list(poly_coeffs)

        def fix(x):
            if isinstance(x, PadicNumber):
                return x.lift_precision(cap)
            if trunc != INF:
                return to_padic(x, p, cap)
            return x

        def strip(seq):
            nonlocal trunc
            seq = [fix(x) for x in seq]
            while seq and is_zero(seq[-1]):
                x = seq.pop()
                if isinstance(x, PadicNumber):
                    trunc = min(trunc, x.prec)
            return tuple(seq)

        pc = strip(pc)
        out = {}
        for r in sorted(new_tails):
            t = strip(new_tails[r])
            if t:
                if r not in poles.finite:
                    raise DomainError(f"tail at residue {r} which is not a removed disc")
                out[r] = t
        return cls(poles, pc, out, trunc)

    @classmethod
    def constant(cls, poles, c) -> "OverconvergentFunction":
        return cls.make(poles, [c], {})

    @classmethod
    def zero(cls, poles) -> "OverconvergentFunction":
        return cls(poles, (), {}, INF)

    @classmethod
    def variable(cls, poles) -> "OverconvergentFunction":
        return cls.make(poles, [ZERO, ONE], {})

    @classmethod
    def polynomial(cls, poles, coeffs) -> "OverconvergentFunction":
        return cls.make(poles, coeffs, {})

    @classmethod
    def pole_power(cls, poles, r, k: int = 1, coeff=ONE) -> "OverconvergentFunction":
        """``coeff * (z - a)**(-k)`` with ``a`` the Teichmüller point of class ``r``."""
        r %= poles.p
        return cls.make(poles, [], {r: [ZERO] * (k - 1) + [coeff]})

    @classmethod
    def frobenius_log(cls, poles, r) -> "OverconvergentFunction":
        """``L_a = log((z**p - a) / (z - a)**p)``, expanded in ``u = 1/(z - a)``."""
        p, kmax = poles.p, poles.kmax
        r %= p
        if r == 0:
            return cls.zero(poles)
        a = poles.lift(r)
        work = poles.prec + _floor_log(kmax, p) + 2
        q = _frobenius_q(a, p)
        q = [to_padic(x, p, work) for x in q]
        total = [PadicNumber.zero(p, work)] * (kmax + 1)
        power = [to_padic(ONE, p, work)]
        for n in range(1, kmax + 1):
            power = _series_mul_short(power, q, kmax + 1)
            if all(is_zero(x) for x in power):
                break
            sign = 1 if n % 2 else -1
            for m in range(len(power)):
                if not is_zero(power[m]):
                    total[m] = total[m] + power[m] * Fraction(sign, n)
        # dropped terms come from q**n / n with n >= (kmax + 1) / (p - 1)
        n0 = -(-(kmax + 1) // (p - 1))
        bound = n0 - _floor_log(n0 + p, p)
        return cls.make(poles, [], {r: total[1:]}, bound)

    @classmethod
    def from_rational(cls, num, den, poles) -> "OverconvergentFunction":
        """Convert ``num/den`` (coefficient lists) whose poles all lie in removed discs."""
        p, prec = poles.p, poles.prec
        num, den = poly.trim(num), poly.trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        den_n, shift = poly.normalize_integral(den, p)
        if valuation(den_n[-1], p) != 0:
            raise DomainError("denominator has roots in the disc at infinity")
        scale_back = Fraction(p) ** shift
        quo, rem = poly.divmod_poly(num, den_n)
        quo = poly.scale(quo, 1 / scale_back) if shift else quo
        tails, trunc, total_deg = {}, INF, 0
        for r in poles.finite:
            a = poles.lift(r)
            F = poly.taylor_shift(den_n, a)
            g, h = poly.hensel_split_at_zero(F, p, prec + 4)
            e = len(g) - 1
            if e == 0:
                continue
            total_deg += e
            if not rem:
                continue
            R = poly.taylor_shift(rem, a)
            ra = poly.mod(poly.mul(R, poly.inverse_mod(h, g, p, prec + 4)), g)
            ra = poly.scale(ra, 1 / scale_back) if shift else ra
            t, tb = _principal_tail(ra, g, p, poles.kmax)
            tails[r] = t
            trunc = min(trunc, tb)
        if total_deg != len(den_n) - 1:
            raise DomainError("denominator has roots outside the removed discs")
        return cls.make(poles, quo, tails, trunc)

    # -- basic properties ---------------------------------------------------
    @property
    def p(self) -> int:
        return self.poles.p

    def is_exact(self) -> bool:
        return self.trunc == INF and all(
            not isinstance(x, PadicNumber) for x in self._all_coeffs())

    def _all_coeffs(self):
        yield from self.poly
        for t in self.tails.values():
            yield from t

    def gauss_valuation(self) -> float:
        """Minimum coefficient valuation: a lower bound for ``v(f(z))`` on ``X``."""
        return _vmin(self._all_coeffs(), self.p)

    def is_zero(self) -> bool:
        return not self.poly and not self.tails

    def precision(self) -> float:
        """Absolute precision of the data in sup norm over ``X``."""
        best = self.trunc
        for x in self._all_coeffs():
            if isinstance(x, PadicNumber):
                best = min(best, x.prec)
        return best

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    def with_poles(self, poles: PoleSet) -> "OverconvergentFunction":
        """The same function viewed on a smaller space (more removed discs)."""
        if not set(self.poles.finite) <= set(poles.finite) or poles.p != self.p:
            raise ValueError("target pole set must contain the current one")
        return OverconvergentFunction.make(poles, self.poly, dict(self.tails), self.trunc)

    # -- linear structure -----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, OverconvergentFunction):
            if other.poles != self.poles:
                raise ValueError("functions on different spaces")
            return other
        return OverconvergentFunction.constant(self.poles, other)

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.poly), len(other.poly))
        pc = [(self.poly[i] if i < len(self.poly) else ZERO)
              + (other.poly[i] if i < len(other.poly) else ZERO) for i in range(n)]
        tails = {}
        for r in set(self.tails) | set(other.tails):
            a, b = self.tails.get(r, ()), other.tails.get(r, ())
            m = max(len(a), len(b))
            tails[r] = [(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO)
                        for i in range(m)]
        return OverconvergentFunction.make(self.poles, pc, tails, min(self.trunc, other.trunc))

    __radd__ = __add__

    def __neg__(self):
        return OverconvergentFunction(self.poles, tuple(-x for x in self.poly),
                                      {r: tuple(-x for x in t) for r, t in self.tails.items()},
                                      self.trunc)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "OverconvergentFunction":
        vc = valuation(c, self.p)
        if vc == INF and not isinstance(c, PadicNumber):
            return OverconvergentFunction.zero(self.poles)
        trunc = self.trunc + vc if self.trunc != INF else INF
        if isinstance(c, PadicNumber):
            # the scalar's own uncertainty times the size of f
            trunc = min(trunc, c.prec + self.gauss_valuation())
        return OverconvergentFunction.make(
            self.poles, [c * x for x in self.poly],
            {r: [c * x for x in t] for r, t in self.tails.items()}, trunc)

    def __mul__(self, other):
        if not isinstance(other, OverconvergentFunction):
            return self.scale(other)
        return _multiply(self, self._coerce(other))

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        out = OverconvergentFunction.constant(self.poles, ONE)
        for _ in range(n):
            out = out * self
        return out

    # -- calculus -------------------------------------------------------------
    def derivative(self) -> "OverconvergentFunction":
        """``df/dz``; ``d(u**k)/dz = -k u**(k+1)`` for ``u = 1/(z - a)``."""
        pc = [i * self.poly[i] for i in range(1, len(self.poly))]
        tails = {r: [ZERO] + [-(k + 1) * t[k] for k in range(len(t))]
                 for r, t in self.tails.items()}
        return OverconvergentFunction.make(self.poles, pc, tails, self.trunc)

    def d(self) -> "OverconvergentForm":
        return OverconvergentForm(self.derivative())

    def evaluate(self, z):
        """Value at a point of ``X``; exact input gives an exact result."""
        poles = self.poles
        poles.check_in_X(z)
        acc = ZERO
        for c in reversed(self.poly):
            acc = acc * z + c
        for r, t in self.tails.items():
            u = 1 / (z - poles.lift(r))
            inner = ZERO
            for c in reversed(t):
                inner = (inner + c) * u
            acc = acc + inner
        if self.trunc != INF or isinstance(acc, PadicNumber):
            acc = to_padic(acc, self.p, poles.prec)
            if self.trunc != INF:
                acc = acc.lift_precision(int(math.floor(self.trunc)))
        return acc

    def expand_at(self, r, degree: int | None = None) -> DiscSeries:
        """Taylor expansion on the disc of ``X`` with residue class ``r`` in ``t = z - c``."""
        poles = self.poles
        D = poles.series_degree if degree is None else degree
        r %= self.p
        if r in poles.finite:
            raise DomainError(f"residue class {r} is a removed disc")
        c = poles.lift(r)
        coeffs = poly.taylor_shift(list(self.poly), c) if self.poly else []
        tail_val = self.trunc
        if len(coeffs) > D + 1:
            tail_val = min(tail_val, min(valuation(x, self.p) + n
                                         for n, x in enumerate(coeffs) if n > D))
            coeffs = coeffs[: D + 1]
        coeffs = coeffs + [ZERO] * (D + 1 - len(coeffs))
        for a_r, t in self.tails.items():
            tau = tail_taylor(list(t), c - poles.lift(a_r), D + 1)
            coeffs = [x + y for x, y in zip(coeffs, tau)]
            tail_val = min(tail_val, D + 1 + _vmin(t, self.p))
        return DiscSeries(self.p, c, tuple(coeffs), tail_val)

    def pullback(self) -> "OverconvergentFunction":
        """Frobenius pullback ``f(z**p)``."""
        p = self.p
        pc = []
        for i, c in enumerate(self.poly):
            pc.extend([c] + [ZERO] * (p - 1) if i < len(self.poly) - 1 else [c])
        tails, trunc = {}, self.trunc
        for r, t in self.tails.items():
            nt, bound = _pullback_tail(list(t), self.poles.lift(r), p, self.poles.kmax)
            tails[r] = nt
            trunc = min(trunc, bound)
        return OverconvergentFunction.make(self.poles, pc, tails, trunc)

    def as_rational(self):
        """``(num, den)`` coefficient lists; only for finite exact data."""
        if self.trunc != INF:
            raise ValueError("truncated data is not rational")
        num, den = list(self.poly) or [], [ONE]
        for r, t in self.tails.items():
            a = self.poles.lift(r)
            k = len(t)
            # sum_j c_j (z-a)^(k-j) / (z-a)^k
            part = []
            lin = [-a, ONE]
            for j, c in enumerate(t, start=1):
                term = [c]
                for _ in range(k - j):
                    term = poly.mul(term, lin)
                part = poly.add(part, term)
            dk = [ONE]
            for _ in range(k):
                dk = poly.mul(dk, lin)
            num = poly.add(poly.mul(num, dk), poly.mul(part, den))
            den = poly.mul(den, dk)
        return poly.trim(num), den

    def __repr__(self):
        parts = []
        if self.poly:
            parts.append(f"poly{list(self.poly)}")
        for r, t in self.tails.items():
            parts.append(f"tail[{r}]({len(t)} terms)")
        return "OverconvergentFunction(" + (", ".join(parts) or "0") + f", trunc={self.trunc})"


EvaluableFunction = OverconvergentFunction


# -- kernels used by the function class ----------------------------------------

def _frobenius_q(a, p):
    """Coefficients (by degree) of ``q(u)`` with ``(z**p - a) = (z - a)**p * (1 + q(u))``."""
    return [ZERO] + [poly.binomial(p, j) * a**j for j in range(1, p)]


def _series_mul_short(a, b, n):
    out = [ZERO] * min(n, len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if i >= n:
            break
        if is_zero(x):
            continue
        for j in range(min(len(b), n - i)):
            out[i + j] = out[i + j] + x * b[j]
    return out


def _suffix_min_val(seq, p):
    out = [INF] * (len(seq) + 1)
    for i in range(len(seq) - 1, -1, -1):
        out[i] = min(out[i + 1], valuation(seq[i], p))
    return out


def _divide_one_plus(g, gamma, length):
    """First ``length`` coefficients of ``g / (1 + gamma)``; ``gamma`` has zero constant term."""
    out = []
    for m in range(length):
        acc = g[m] if m < len(g) else ZERO
        for j in range(1, min(m, len(gamma) - 1) + 1):
            if not is_zero(gamma[j]):
                acc = acc - gamma[j] * out[m - j]
        out.append(acc)
    return out


def _principal_tail(ra, g, p, kmax):
    """Tail ``(c_1, c_2, ...)`` of ``r(s)/g(s)`` in ``u = 1/s`` and a bound on the dropped part."""
    e = len(g) - 1
    numer = [ZERO] * (e + 1)
    for i, ri in enumerate(ra):
        numer[e - i] = ri
    gamma = [ZERO] + [g[e - j] for j in range(1, e + 1)]
    if all(is_zero(x) and not isinstance(x, PadicNumber) for x in gamma):
        return numer[1:], INF
    vg = _vmin(gamma, p)
    series = _divide_one_plus(numer, gamma, kmax + 1)
    bound = _vmin(ra, p) + (-(-(kmax + 1 - e) // e)) * vg
    return series[1:], bound


def _pullback_tail(t, a, p, kmax):
    """Tail of ``sum_k t[k-1] (z**p - a)**(-k)`` in ``u = 1/(z - a)`` and its truncation bound."""
    K = len(t)
    if is_zero(a) and not isinstance(a, PadicNumber):
        out = [ZERO] * (p * K)
        for k, c in enumerate(t, start=1):
            out[p * k - 1] = c
        return out, INF
    q = _frobenius_q(a, p)
    L = kmax + 1
    h = []
    for k in range(K, 0, -1):
        g = list(h) if h else [ZERO]
        g[0] = g[0] + t[k - 1]
        shifted = [ZERO] * p + g
        h = _divide_one_plus(shifted[:L], q, L)
    bound = INF
    for k, c in enumerate(t, start=1):
        vc = valuation(c, p)
        if vc != INF:
            bound = min(bound, vc + max(0, -(-(L - p * k) // (p - 1))))
    return h[1:], bound


def _poly_times_tail(P, c, a):
    """``P(z) * sum_k c_k (z - a)**(-k)`` split into (polynomial in z, tail at a)."""
    pi = poly.taylor_shift(list(P), a)
    K = len(c)
    tail = []
    for i in range(1, K + 1):
        acc = ZERO
        for j in range(len(pi)):
            if i + j > K:
                break
            acc = acc + pi[j] * c[i + j - 1]
        tail.append(acc)
    ps = [ZERO] * max(len(pi), 1)
    for j in range(len(pi)):
        for k in range(1, min(j, K) + 1):
            ps[j - k] = ps[j - k] + pi[j] * c[k - 1]
    return poly.taylor_shift(ps, -a), tail


def _cross_principal(c, a, d, b):
    """Principal part at ``a`` of ``(sum c_i u_a**i) * (sum d_k u_b**k)`` for distinct discs."""
    K = len(c)
    tau = tail_taylor(list(d), a - b, K)
    out = []
    for i in range(1, K + 1):
        acc = ZERO
        for m in range(K - i + 1):
            acc = acc + c[i + m - 1] * tau[m]
        out.append(acc)
    return out


def _same_disc_product(c, d, kmax, p):
    n = min(len(c) + len(d), kmax)
    out = [ZERO] * n  # index n-1 holds u**n
    for i, x in enumerate(c, start=1):
        if is_zero(x) and not isinstance(x, PadicNumber):
            continue
        for j, y in enumerate(d, start=1):
            if i + j > n:
                break
            out[i + j - 1] = out[i + j - 1] + x * y
    dropped = INF
    if len(c) + len(d) > kmax:
        sm = _suffix_min_val(d, p)
        for i, x in enumerate(c, start=1):
            j0 = kmax + 1 - i  # smallest j with i + j > kmax
            if j0 <= len(d):
                dropped = min(dropped, valuation(x, p) + sm[max(j0, 1) - 1])
    return out, dropped


def _acc_into(target: dict, r, seq):
    cur = target.setdefault(r, [])
    if len(cur) < len(seq):
        cur.extend([ZERO] * (len(seq) - len(cur)))
    for i, x in enumerate(seq):
        cur[i] = cur[i] + x


def _multiply(f: OverconvergentFunction, g: OverconvergentFunction) -> OverconvergentFunction:
    poles, p = f.poles, f.p
    if f.is_zero() or g.is_zero():
        trunc = min(f.trunc + g.gauss_valuation(), g.trunc + f.gauss_valuation())
        return OverconvergentFunction.make(poles, [], {}, trunc)
    pc = poly.mul(list(f.poly), list(g.poly))
    tails: dict = {}
    trunc = INF
    if f.trunc != INF:
        trunc = min(trunc, f.trunc + g.gauss_valuation())
    if g.trunc != INF:
        trunc = min(trunc, g.trunc + f.gauss_valuation())
    for (P, other) in ((f.poly, g), (g.poly, f)):
        if not P:
            continue
        for r, t in other.tails.items():
            pp, tail = _poly_times_tail(P, list(t), poles.lift(r))
            pc = poly.add(pc, pp)
            _acc_into(tails, r, tail)
    for r, t in f.tails.items():
        for s, u in g.tails.items():
            if r == s:
                prod, dropped = _same_disc_product(list(t), list(u), poles.kmax, p)
                trunc = min(trunc, dropped)
                _acc_into(tails, r, prod)
            else:
                a, b = poles.lift(r), poles.lift(s)
                _acc_into(tails, r, _cross_principal(list(t), a, list(u), b))
                _acc_into(tails, s, _cross_principal(list(u), b, list(t), a))
    return OverconvergentFunction.make(poles, pc, tails, trunc)


# -- forms --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OverconvergentForm:
    """The 1-form ``coeff(z) dz``."""

    coeff: OverconvergentFunction

    @property
    def poles(self) -> PoleSet:
        return self.coeff.poles

    @property
    def p(self) -> int:
        return self.coeff.p

    @classmethod
    def basis(cls, poles, r) -> "OverconvergentForm":
        """``eta_a = dz/(z - a)``."""
        return cls(OverconvergentFunction.pole_power(poles, r, 1))

    @classmethod
    def from_rational(cls, num, den, poles) -> "OverconvergentForm":
        return cls(OverconvergentFunction.from_rational(num, den, poles))

    @classmethod
    def zero(cls, poles) -> "OverconvergentForm":
        return cls(OverconvergentFunction.zero(poles))

    def __add__(self, other):
        return OverconvergentForm(self.coeff + other.coeff)

    def __neg__(self):
        return OverconvergentForm(-self.coeff)

    def __sub__(self, other):
        return OverconvergentForm(self.coeff - other.coeff)

    def __mul__(self, other):
        if isinstance(other, OverconvergentForm):
            raise TypeError("product of two 1-forms vanishes on a curve")
        return OverconvergentForm(self.coeff * other)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def equals(self, other) -> bool:
        return self.coeff.equals(other.coeff)

    def precision(self) -> float:
        return self.coeff.precision()

    def residue(self, r):
        """Sum of the residues in the removed disc of class ``r`` (``"inf"`` allowed)."""
        if r == INFINITY:
            return self.residue_at_infinity()
        r %= self.p
        t = self.coeff.tails.get(r)
        return t[0] if t else ZERO

    def residues(self) -> dict:
        out = {r: self.residue(r) for r in self.poles.finite}
        out[INFINITY] = self.residue_at_infinity()
        return out

    def residue_at_infinity(self):
        """Residue in the chart ``w = 1/z``: ``f(1/w) * (-1/w**2)``, coefficient of ``1/w``.

        ``z**n dz`` contributes ``-w**(-n-2) dw`` (never ``1/w``); ``(z - a)**(-k) dz``
        becomes ``-w**(k-2) (1 - a w)**(-k) dw``, whose ``1/w`` coefficient is
        ``-binom(k + j - 1, j) a**j`` with ``j = 1 - k``, so only ``k = 1`` survives.
        """
        acc = ZERO
        for r, t in self.coeff.tails.items():
            a = self.poles.lift(r)
            for k, c in enumerate(t, start=1):
                j = 1 - k
                if j < 0:
                    break
                acc = acc - c * poly.binomial(k + j - 1, j) * a**j
        return acc

    def reduce(self):
        """Write the form as ``sum_a c_a dz/(z - a) + d(primitive)``.

        Returns ``(coeffs, primitive)`` with ``coeffs`` keyed by residue class.
        """
        f = self.coeff
        p = self.p
        coeffs = {r: t[0] for r, t in f.tails.items() if not is_zero(t[0])}
        pc = [ZERO] + [f.poly[i] / (i + 1) for i in range(len(f.poly))]
        tails = {}
        for r, t in f.tails.items():
            if len(t) > 1:
                tails[r] = [t[k] / (-k) for k in range(1, len(t))]
        trunc = f.trunc
        if trunc != INF:
            # dropped tail terms are divided by k - 1 <= kmax on integration
            trunc -= _floor_log(self.poles.kmax, p)
        prim = OverconvergentFunction.make(self.poles, pc, tails, trunc)
        return coeffs, prim

    def pullback(self) -> "OverconvergentForm":
        """``f(z**p) * p z**(p-1) dz``."""
        p = self.p
        jac = OverconvergentFunction.polynomial(self.poles, [ZERO] * (p - 1) + [Fraction(p)])
        return OverconvergentForm(self.coeff.pullback() * jac)

    def expand_at(self, r, degree: int | None = None) -> DiscSeries:
        return self.coeff.expand_at(r, degree)

    def __repr__(self):
        return f"OverconvergentForm({self.coeff!r} dz)"


def frobenius_pullback(x):
    return x.pullback()


def expand_at_disc(x, r, degree: int | None = None) -> DiscSeries:
    return x.expand_at(r, degree)


def disc_residue(form: OverconvergentForm, r):
    return form.residue(r)


def cohomology_reduce(form: OverconvergentForm):
    return form.reduce()


def frobenius_log_value(poles: PoleSet, r_pole: int, z):
    """``L_a(z) = log_unit((z**p - a) / (z - a)**p)`` computed directly from the definition."""
    p = poles.p
    a = poles.lift(r_pole)
    val = (z**p - a) / (z - a) ** p
    return log_unit(val, p, poles.prec)


def residue_by_trace(num, den, r, poles: PoleSet):
    """Residue sum of ``num/den dz`` over the removed disc ``r`` by the companion-matrix trace.

    The denominator is Hensel-split at the disc; the local factor ``g`` must be
    squarefree.  The sum over the roots ``beta`` of ``g`` of ``num(beta)/den'(beta)``
    equals ``trace(M_num * M_den'**(-1))`` with ``M_h`` multiplication by ``h``
    in ``K[s]/(g)``.
    """
    p, prec = poles.p, poles.prec
    a = poles.lift(r)
    den_n, shift = poly.normalize_integral(poly.trim(den), p)
    F = poly.taylor_shift(den_n, a)
    g, _ = poly.hensel_split_at_zero(F, p, prec + 4)
    e = len(g) - 1
    if e == 0:
        return ZERO
    N = poly.mod(poly.taylor_shift(poly.trim(num), a), g)
    Dp = poly.mod(poly.derivative(F), g)
    Mn = _mult_matrix(N, g)
    Md = _mult_matrix(Dp, g)
    X = _solve_right(Md, Mn, p)
    tr = ZERO
    for i in range(e):
        tr = tr + X[i][i]
    return tr / Fraction(p) ** shift if shift else tr


def _mult_matrix(h, g):
    """Matrix of multiplication by ``h`` on the basis ``1, s, ..., s**(e-1)`` of ``K[s]/(g)``."""
    e = len(g) - 1
    cols = []
    cur = list(h)
    for _ in range(e):
        col = poly.mod(cur, g)
        cols.append(col + [ZERO] * (e - len(col)))
        cur = poly.mul(cur, [ZERO, ONE])
    return [[cols[j][i] for j in range(e)] for i in range(e)]


def _solve_right(A, B, p):
    """``A**(-1) B`` by Gaussian elimination with minimal-valuation pivots."""
    n = len(A)
    M = [list(A[i]) + list(B[i]) for i in range(n)]
    for col in range(n):
        piv = min(range(col, n), key=lambda i: valuation(M[i][col], p))
        if is_zero(M[piv][col]):
            raise ZeroDivisionError("singular matrix (local factor not squarefree?)")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for i in range(n):
            if i != col and not is_zero(M[i][col]):
                fac = M[i][col]
                M[i] = [x - fac * y for x, y in zip(M[i], M[col])]
    return [row[n:] for row in M]
