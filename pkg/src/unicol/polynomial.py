"""Dense univariate polynomials over Q_p (or Q) as coefficient lists, low degree first.

Scalars are ``Fraction`` or :class:`PadicNumber`; a p-adic coefficient that
is zero to its precision counts as zero when trimming.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb

from .padic import PadicNumber, is_zero, to_padic, valuation

ZERO = Fraction(0)
ONE = Fraction(1)


def trim(a):
    a = list(a)
    while a and is_zero(a[-1]):
        a.pop()
    return a


def add(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else ZERO) + (b[i] if i < len(b) else ZERO)
                 for i in range(n)])


def neg(a):
    return [-x for x in a]


def sub(a, b):
    return add(a, neg(b))


def scale(a, c):
    return trim([c * x for x in a])


def mul(a, b):
    if not a or not b:
        return []
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if is_zero(x) and not isinstance(x, PadicNumber):
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return trim(out)


def degree(a) -> int:
    return len(trim(a)) - 1


def divmod_poly(a, b):
    """Quotient and remainder; the leading coefficient of ``b`` must be invertible."""
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    lead_inv = 1 / b[-1]
    q = [ZERO] * max(len(a) - db, 0)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] * lead_inv
        q[i - db] = c
        if is_zero(c) and not isinstance(c, PadicNumber):
            continue
        for j in range(db + 1):
            a[i - db + j] = a[i - db + j] - c * b[j]
    return trim(q), trim(a[:db])


def mod(a, b):
    return divmod_poly(a, b)[1]


def evaluate(a, x):
    acc = ZERO
    for c in reversed(a):
        acc = acc * x + c
    return acc


def derivative(a):
    return trim([i * a[i] for i in range(1, len(a))])


def taylor_shift(a, c):
    """Coefficients of ``a(c + s)`` in ``s``."""
    a = list(a)
    n = len(a)
    # repeated synthetic division
    out = a[:]
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] = out[j] + c * out[j + 1]
    return trim(out)


def monic(a):
    a = trim(a)
    inv = 1 / a[-1]
    return [x * inv for x in a[:-1]] + [ONE]


# -- polynomials over F_p (int lists) ---------------------------------------

def _fp_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_divmod(a, b, p):
    a, b = _fp_trim([x % p for x in a]), _fp_trim([x % p for x in b])
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        k = len(a) - len(b)
        q[k] = c
        for j in range(len(b)):
            a[k + j] = (a[k + j] - c * b[j]) % p
        a = _fp_trim(a)
    return q, a


def _fp_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return _fp_trim(out)


def _fp_sub(a, b, p):
    n = max(len(a), len(b))
    return _fp_trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
                     for i in range(n)])


def fp_xgcd(a, b, p):
    """Return (g, s, t) with s*a + t*b = g over F_p, g monic."""
    r0, r1 = _fp_trim([x % p for x in a]), _fp_trim([x % p for x in b])
    s0, s1, t0, t1 = [1], [], [], [1]
    while r1:
        q, r = _fp_divmod(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _fp_sub(s0, _fp_mul(q, s1, p), p)
        t0, t1 = t1, _fp_sub(t0, _fp_mul(q, t1, p), p)
    inv = pow(r0[-1], -1, p)
    return ([x * inv % p for x in r0], [x * inv % p for x in s0], [x * inv % p for x in t0])


def residues_mod_p(a, p):
    """Reduce an integral polynomial mod p to an int list."""
    out = []
    for x in a:
        vx = valuation(x, p)
        if vx < 0:
            raise ValueError("polynomial not integral")
        if vx > 0:
            out.append(0)
        elif isinstance(x, PadicNumber):
            out.append(x.residue())
        else:
            x = Fraction(x)
            out.append(x.numerator * pow(x.denominator, -1, p) % p)
    return _fp_trim(out)


def _content_val(a, p):
    return min(valuation(x, p) for x in a if not is_zero(x))


def normalize_integral(a, p):
    """Divide by a power of p so that the minimum coefficient valuation is 0."""
    v = _content_val(a, p)
    return scale(a, Fraction(p) ** (-v)) if v else list(a), v


def _to_padic_poly(a, p, prec):
    return [to_padic(x, p, prec) for x in a]


def hensel_split_at_zero(F, p, prec):
    """Split ``F(s) = g(s) * h(s)`` with ``g`` monic, ``g = s**e mod p`` and ``h(0)`` a unit.

    ``F`` must be integral with a unit coefficient.  Returns ``(g, h)``; the
    factors are exact when ``F`` is exactly divisible by ``s**e``.
    """
    F = trim(F)
    Fbar = residues_mod_p(F, p)
    e = 0
    while e < len(Fbar) and Fbar[e] == 0:
        e += 1
    if e == 0:
        return [ONE], F
    if all(is_zero(c) and not isinstance(c, PadicNumber) for c in F[:e]):
        return [ZERO] * e + [ONE], F[e:]
    # linear Hensel lifting in p-adic arithmetic
    F = _to_padic_poly(F, p, prec)
    hbar = Fbar[e:]
    _, sbar, tbar = fp_xgcd([0] * e + [1], hbar, p)
    S = [Fraction(x) for x in sbar]
    T = [Fraction(x) for x in tbar]
    g = [to_padic(0, p, prec)] * e + [to_padic(1, p, prec)]
    for _ in range(prec + 2):
        h, r = divmod_poly(F, g)
        if not r:
            break
        g = add(g, mod(mul(T, r), g))
    h = divmod_poly(F, g)[0]
    return g, h


def inverse_mod(a, g, p, prec):
    """Inverse of ``a`` modulo the monic ``g`` with ``g = s**e (mod p)`` and ``a(0)`` a unit.

    Newton iteration ``x <- x (2 - a x)`` starting from the inverse modulo ``(p, s**e)``.
    """
    g = trim(g)
    e = len(g) - 1
    a = mod(a, g)
    abar = residues_mod_p(a, p)[:e] if a else []
    if not abar or abar[0] == 0:
        raise ZeroDivisionError("not invertible modulo the factor")
    # power series inverse mod (p, s^e)
    inv0 = pow(abar[0], -1, p)
    x = [inv0]
    for n in range(1, e):
        acc = sum(abar[k] * x[n - k] for k in range(1, min(n, len(abar) - 1) + 1)) % p
        x.append(-acc * inv0 % p)
    x = [Fraction(c) for c in x]
    exact = all(not isinstance(c, PadicNumber) for c in list(a) + list(g))
    for _ in range(2 * prec.bit_length() + 4):
        ax = mod(mul(a, x), g)
        resid = sub([ONE], ax)
        if not resid:
            break
        x = mod(add(x, mul(x, resid)), g)
        if exact and all(isinstance(c, Fraction) for c in x):
            # exact arithmetic need not converge p-adically in finitely many steps
            x = _to_padic_poly(x, p, prec)
            exact = False
    return x


def power_sums(g, count):
    """Power sums ``P_k`` of the roots of the monic ``g`` for ``k < count`` (Newton)."""
    g = trim(g)
    n = len(g) - 1
    # elementary symmetric functions with signs: g = s^n + c_{n-1} s^{n-1} + ...
    c = [g[n - i] for i in range(n + 1)]  # c[0] = 1, c[i] = coefficient of s^{n-i}
    P = [Fraction(n)]
    for k in range(1, count):
        acc = ZERO
        for i in range(1, min(k, n) + 1):
            acc = acc + c[i] * (P[k - i] if k - i > 0 else ZERO)
        if k <= n:
            acc = acc + k * c[k]
        P.append(-acc)
    return P


def trace_sum(q, g):
    """``sum(q(beta))`` over the roots ``beta`` of the monic ``g`` (companion-matrix trace)."""
    q = mod(q, g)
    P = power_sums(g, max(len(q), 1))
    acc = ZERO
    for i, qi in enumerate(q):
        acc = acc + qi * P[i]
    return acc


def binomial(n: int, k: int) -> int:
    return comb(n, k)
