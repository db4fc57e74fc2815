"""Unipotent connections over the rational function field and abstract Coleman functions.

Teichmüller points are roots of unity, so all connection matrices and
functionals built from the removed discs live in ``Q(zeta)(z)`` with
``zeta`` a primitive ``(p-1)``-th root of unity.  Linear algebra is exact
(Gauss-Jordan over the canonical representation in ``cyclotomic``); the embedding ``zeta -> teich(g)``, ``g`` the least
primitive root mod ``p``, carries exact data to ``Q_p``.

Row convention throughout: ``nabla(x) = dx + x B`` for row vectors ``x``, so a
horizontal frame satisfies ``dY = -Y B``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import sympy as sp
from sympy.polys.matrices import DomainMatrix

from . import polynomial as poly
from .cyclotomic import CyclotomicFunctionField
from .overconvergent import OverconvergentForm, OverconvergentFunction, PoleSet
from .padic import INF, PadicNumber, is_zero, to_padic, valuation
from .series import DiscSeries, DomainError

ZERO = Fraction(0)
ONE = Fraction(1)


def primitive_root(p: int) -> int:
    phi = p - 1
    factors = [q for q in range(2, phi + 1) if phi % q == 0 and all(q % r for r in range(2, q))]
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in factors):
            return g
    return 1


def _frac(c) -> Fraction:
    """sympy/gmpy rational to Fraction."""
    return Fraction(int(c.numerator), int(c.denominator))


class FunctionField:
    """``Q(zeta_{p-1})(z)`` with its embedding into ``Q_p(z)``."""

    _cache: dict = {}

    def __new__(cls, p: int, prec: int = 24):
        key = (p, prec)
        if key not in cls._cache:
            obj = super().__new__(cls)
            obj._setup(p, prec)
            cls._cache[key] = obj
        return cls._cache[key]

    def _setup(self, p, prec):
        self.p = p
        self.prec = prec
        self.symbol = sp.Symbol("z")
        if p - 1 <= 2:
            self.A = sp.QQ
            self.zeta = sp.QQ(-1) if p == 3 else sp.QQ(1)
        else:
            self.A = sp.QQ.algebraic_field(sp.exp(2 * sp.pi * sp.I / (p - 1)))
            self.zeta = self.A([1, 0])
        self.K = CyclotomicFunctionField(self.A, self.zeta, p - 1)
        self.z = self.K.gen
        self.ring = self.K.A_ring
        self.x = self.K.A_x
        self.g = primitive_root(p)
        self._dlog = {pow(self.g, k, p): k for k in range(p - 1)}
        from .padic import teichmueller_padic
        self._zeta_padic = teichmueller_padic(self.g, p, prec + 4) if p > 3 else None

    # -- constants ----------------------------------------------------------
    def teich(self, r):
        """Exact Teichmüller point of class ``r`` as an element of ``A``."""
        r %= self.p
        if r == 0:
            return self.A.zero
        return self.zeta ** self._dlog[r]

    def const_to_A(self, c):
        if isinstance(c, PadicNumber):
            raise TypeError("p-adic constants have no exact representative")
        c = Fraction(c)
        return self.A.convert(sp.Rational(c.numerator, c.denominator))

    def embed_const(self, a):
        """Image of an element of ``A`` in ``Q_p`` (exact Fraction when rational)."""
        if self.A is sp.QQ:
            return _frac(a)
        coeffs = [_frac(c) for c in a.to_list()]
        if len(coeffs) <= 1:
            return coeffs[0] if coeffs else ZERO
        acc = ZERO
        for c in coeffs:
            acc = acc * self._zeta_padic + c
        return acc

    # -- elements -----------------------------------------------------------
    def const(self, c):
        return self.K.convert_from(self.const_to_A(c), self.A) if not isinstance(c, type(self.z)) \
            else c

    def from_A(self, a):
        return self.K.convert_from(a, self.A)

    def from_function(self, f: OverconvergentFunction):
        """Exact image of Mittag-Leffler data with rational coefficients."""
        if f.trunc != INF:
            raise TypeError("truncated overconvergent data is not rational")
        acc = self.K.zero
        zp = self.K.one
        for c in f.poly:
            acc = acc + self.const(c) * zp
            zp = zp * self.z
        for r, t in f.tails.items():
            u = self.K.one / (self.z - self.from_A(self.teich(r)))
            up = u
            for c in t:
                acc = acc + self.const(c) * up
                up = up * u
        return acc

    def from_form(self, w: OverconvergentForm):
        return self.from_function(w.coeff)

    def eta(self, r):
        """``dz/(z - a)`` as its ``dz`` coefficient."""
        return self.K.one / (self.z - self.from_A(self.teich(r)))

    def parse(self, text: str):
        """Exact rational literal (``teich``, ``poly``, ``z``, optional ``dz``) as an element of K.

        A form literal returns its ``dz`` coefficient.
        """
        from sympy.parsing.sympy_parser import (convert_xor, implicit_multiplication,
                                                parse_expr, standard_transformations)
        names = {"z": sp.Symbol("z"), "dz": sp.Symbol("dz"),
                 "teich": sp.Function("teich"), "poly": sp.Function("poly"),
                 "zeta": sp.Symbol("zeta")}
        expr = parse_expr(text, local_dict=names, evaluate=False,
                          transformations=standard_transformations
                          + (implicit_multiplication, convert_xor))
        expr = sp.expand(expr) if expr.has(names["dz"]) else expr
        if expr.has(names["dz"]):
            expr = sp.simplify(expr / names["dz"])
            if expr.has(names["dz"]):
                raise ValueError("form literal must be linear in dz")
        return self._from_expr(expr)

    def _from_expr(self, e):
        if e.is_Rational:
            return self.const(Fraction(int(e.p), int(e.q)))
        if e.is_Symbol:
            if e.name == "zeta":
                return self.from_A(self.zeta)
            if e.name != "z":
                raise ValueError(f"unknown symbol {e.name}")
            return self.z
        if e.is_Add:
            acc = self.K.zero
            for a in e.args:
                acc = acc + self._from_expr(a)
            return acc
        if e.is_Mul:
            acc = self.K.one
            for a in e.args:
                acc = acc * self._from_expr(a)
            return acc
        if e.is_Pow and e.exp.is_Integer:
            base = self._from_expr(e.base)
            n = int(e.exp)
            return base ** n if n >= 0 else self.K.one / base ** (-n)
        if isinstance(e, sp.Function) or hasattr(e, "func"):
            name = getattr(e.func, "__name__", "")
            if name == "teich":
                return self.from_A(self.teich(int(e.args[0])))
            if name == "poly":
                acc, zp = self.K.zero, self.K.one
                for a in e.args:
                    acc = acc + self._from_expr(a) * zp
                    zp = zp * self.z
                return acc
        raise ValueError(f"unsupported literal {e}")

    def poly_coeffs(self, pe):
        """Coefficient list (low degree first) of a polynomial element, embedded in ``Q_p``."""
        deg = pe.degree() if pe else -1
        out = [ZERO] * (deg + 1)
        for (k,), c in pe.terms():
            out[k] = self.embed_const(c)
        return out

    def to_function(self, e, poles: PoleSet) -> OverconvergentFunction:
        n, d = e.reduced
        return OverconvergentFunction.from_rational(self.poly_coeffs(n), self.poly_coeffs(d), poles)

    def to_form(self, e, poles: PoleSet) -> OverconvergentForm:
        return OverconvergentForm(self.to_function(e, poles))

    def diff(self, e):
        return e.derivative()

    def evaluate(self, e, z):
        """Value at a point of ``Q_p`` (p-adic or exact)."""
        n, d = e.reduced
        num = poly.evaluate(self.poly_coeffs(n), z)
        den = poly.evaluate(self.poly_coeffs(d), z)
        if is_zero(den):
            raise ZeroDivisionError("pole at the evaluation point")
        return num / den

    def evaluate_at_teich(self, e, r):
        """Exact value at the Teichmüller point of class ``r`` (an element of ``A``)."""
        a = self.teich(r)
        n, d = e.numer, e.denom
        den = d.evaluate(self.x, a) if d.degree() > 0 else d.LC
        if den == self.A.zero:
            n, d = e.reduced
            den = d.evaluate(self.x, a) if d.degree() > 0 else d.LC
            if den == self.A.zero:
                raise ZeroDivisionError("pole at the evaluation point")
        num = n.evaluate(self.x, a) if n.degree() > 0 else (n.LC if n else self.A.zero)
        return self.A.quo(num, den)

    def is_zero(self, e) -> bool:
        return self.K.is_zero(e)

    def to_str(self, e) -> str:
        return str(sp.factor(sp.sympify(self.to_literal(e)))) if not self.K.is_zero(e) else "0"

    def _A_to_sympy(self, c):
        zeta = sp.Symbol("zeta")
        if self.A is sp.QQ:
            return sp.Rational(int(c.numerator), int(c.denominator))
        coeffs = c.to_list()
        d = len(coeffs) - 1
        return sp.Add(*[sp.Rational(int(k.numerator), int(k.denominator)) * zeta ** (d - i)
                        for i, k in enumerate(coeffs)])

    def _poly_to_sympy(self, pe, scale):
        z = sp.Symbol("z")
        return sp.Add(*[self._A_to_sympy(self.A.quo(c, scale)) * z ** k
                        for (k,), c in pe.terms()])

    def to_literal(self, e) -> str:
        """Deterministic literal in ``z`` and ``zeta`` (the root of unity ``teich(g)``).

        The denominator is made monic, so equal elements print identically.
        """
        if self.K.is_zero(e):
            return "0"
        lc = e.denom.LC
        num = self._poly_to_sympy(e.numer, lc)
        den = self._poly_to_sympy(e.denom, lc)
        return str(num) if den == 1 else f"({num})/({den})"

    canonical_key = to_literal


# -- exact one-variable calculus over K ---------------------------------------

def _dense_low(pe, n=None):
    """Coefficients of a polynomial element, low degree first, padded to ``n``."""
    out = list(reversed(pe.to_dense())) if pe else []
    if n is not None:
        out = (out + [pe.ring.domain.zero] * n)[:n]
    return out


class ExactCalculus:
    """Partial fractions, residues and primitives for forms with poles at removed centers."""

    def __init__(self, field: FunctionField, letters, base: int):
        self.F = field
        self.letters = tuple(letters)
        self.base = base % field.p
        self._lin = {a: field.x - field.ring(field.teich(a)) for a in self.letters}

    def principal_parts(self, e):
        """``{a: [c_1, ..., c_m]}`` with ``e = poly + sum_a sum_k c_k (z - a)**-k``; returns ``(parts, poly)``."""
        F, A = self.F, self.F.A
        n, d = e.numer, e.denom
        parts = {}
        rest = e
        for a in self.letters:
            lin = self._lin[a]
            m, e_ = 0, d
            while e_.degree() > 0:
                q, r = divmod(e_, lin)
                if r:
                    break
                e_, m = q, m + 1
            if m == 0:
                continue
            t = F.ring(F.teich(a))
            ns = _dense_low(n.compose(F.x, F.x + t), m)
            es = _dense_low(e_.compose(F.x, F.x + t), m)
            inv0 = A.quo(A.one, es[0])
            q = []
            for j in range(m):
                acc = ns[j]
                for i in range(1, j + 1):
                    acc = acc - es[i] * q[j - i]
                q.append(acc * inv0)
            coeffs = [q[m - k] for k in range(1, m + 1)]  # c_k for k = 1..m
            parts[a] = coeffs
            u = F.K.one / (F.z - F.from_A(F.teich(a)))
            for k, c in enumerate(coeffs, start=1):
                rest = rest - F.from_A(c) * u ** k
        if rest.denom.degree() > 0:
            raise DomainError("pole outside the removed Teichmüller discs")
        return parts, rest

    def reduce(self, e):
        """``e dz = sum_a res_a eta_a + dg``; returns ``(residues, g)`` with ``g`` in K."""
        F = self.F
        parts, rest = self.principal_parts(e)
        num = rest.numer
        den = rest.denom.LC
        coeffs = _dense_low(num)
        g = F.K.zero
        zp = F.z
        for k, c in enumerate(coeffs):
            g = g + F.from_A(F.A.quo(c, den * F.A(k + 1))) * zp
            zp = zp * F.z
        residues = {}
        for a, cs in parts.items():
            if cs[0] != F.A.zero:
                residues[a] = cs[0]
            u = F.K.one / (F.z - F.from_A(F.teich(a)))
            for k in range(2, len(cs) + 1):
                if cs[k - 1] != F.A.zero:
                    g = g + F.from_A(F.A.quo(cs[k - 1], F.A(1 - k))) * u ** (k - 1)
        return residues, g

    def primitive(self, terms: dict, value=None) -> dict:
        """Exact primitive of ``sum_w terms[w] I_w dz`` normalized to ``value`` at the base center."""
        F = self.F
        work = {tuple(w): c for w, c in terms.items() if not F.is_zero(c)}
        result: dict = {}

        def acc(w, c):
            result[w] = result[w] + c if w in result else c

        while work:
            w = max(work, key=lambda v: (len(v), v))
            f = work.pop(w)
            residues, g = self.reduce(f)
            for a, c in residues.items():
                acc(w + (a,), F.from_A(c))
            if F.is_zero(g):
                continue
            acc(w, g)
            if w:
                corr = -(g * F.eta(w[-1]))
                v = w[:-1]
                work[v] = work[v] + corr if v in work else corr
        const = result.get((), F.K.zero)
        shift = F.from_A(F.evaluate_at_teich(const, self.base)) if not F.is_zero(const) else F.K.zero
        target = F.from_A(value) if value is not None else F.K.zero
        result[()] = const - shift + target
        return {w: c for w, c in result.items() if not F.is_zero(c)}

    def d(self, terms: dict) -> dict:
        """``d(sum g_w I_w)`` as word coefficients of ``dz``."""
        F = self.F
        out: dict = {}
        for w, g in terms.items():
            out[w] = out.get(w, F.K.zero) + F.diff(g)
            if w:
                v = w[:-1]
                out[v] = out.get(v, F.K.zero) + g * F.eta(w[-1])
        return {w: c for w, c in out.items() if not F.is_zero(c)}


# -- matrices over K ------------------------------------------------------------

def _gauss_jordan(K, rows, n):
    """Reduced echelon form over the field ``K`` by plain pivoting.

    Fraction-free elimination over a rational function field lets numerators
    and denominators grow without cancelling; dividing by the pivot keeps
    every entry reduced.
    """
    rows = [list(r) for r in rows]
    pivots = []
    top = 0
    for col in range(n):
        hit = next((i for i in range(top, len(rows)) if not K.is_zero(rows[i][col])), None)
        if hit is None:
            continue
        rows[top], rows[hit] = rows[hit], rows[top]
        inv = K.one / rows[top][col]
        rows[top] = [c * inv for c in rows[top]]
        for i in range(len(rows)):
            if i != top and not K.is_zero(rows[i][col]):
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[top])]
        pivots.append(col)
        top += 1
        if top == len(rows):
            break
    return rows[:top], tuple(pivots)


def _rref_rows(F, rows, n):
    """Reduced row echelon basis of the span of ``rows`` (length-``n`` lists) and its pivots."""
    rows = [r for r in rows if any(not F.is_zero(c) for c in r)]
    if not rows:
        return [], ()
    return _gauss_jordan(F.K, rows, n)


def _nullspace_rows(F, rows, n):
    """Basis (as rows) of ``{v : M v = 0}`` for ``M`` given by ``rows``."""
    K = F.K
    if not rows:
        return [[K.one if i == j else K.zero for j in range(n)] for i in range(n)]
    R, piv = _rref_rows(F, rows, n)
    out = []
    for free in (j for j in range(n) if j not in piv):
        v = [K.zero] * n
        v[free] = K.one
        for r, pc in zip(R, piv):
            v[pc] = -r[free]
        out.append(v)
    return out


@dataclass(frozen=True)
class UnipotentConnection:
    """``nabla(x) = dx + x B`` on row vectors, ``B`` strictly upper triangular over K.

    Entries of ``B`` are ``dz`` coefficients.  ``labels`` name the basis (words
    for word connections) and ``filtration`` lists the block sizes.
    """

    field: FunctionField
    B: tuple
    labels: tuple = ()
    filtration: tuple = ()

    @property
    def rank(self) -> int:
        return len(self.B)

    @classmethod
    def make(cls, field, B, labels=None, filtration=None):
        n = len(B)
        B = tuple(tuple(row) for row in B)
        for i in range(n):
            for j in range(i + 1):
                if not field.is_zero(B[i][j]):
                    raise ValueError("connection matrix must be strictly upper triangular")
        labels = tuple(labels) if labels is not None else tuple(range(n))
        filtration = tuple(filtration) if filtration is not None else _blocks(field, B)
        return cls(field, B, labels, filtration)

    @classmethod
    def trivial(cls, field, n=1):
        return cls.make(field, [[field.K.zero] * n for _ in range(n)])

    @classmethod
    def from_forms(cls, field, forms):
        """Rank ``m+1`` connection whose horizontal row through ``e_0`` is ``(1, I_{w1}, I_{w1 w2}, ...)``."""
        m = len(forms)
        B = [[field.K.zero] * (m + 1) for _ in range(m + 1)]
        for i, w in enumerate(forms):
            B[i][i + 1] = -w
        return cls.make(field, B)

    @classmethod
    def word_connection(cls, field, words):
        """``M_B`` on a prefix-closed word set with ``B[w[:-1], w] = -eta_{w[-1]}``."""
        words = sorted({tuple(w) for w in words}, key=lambda v: (len(v), v))
        index = {w: i for i, w in enumerate(words)}
        for w in words:
            if w and w[:-1] not in index:
                raise ValueError(f"word set is not prefix closed at {w}")
        n = len(words)
        B = [[field.K.zero] * n for _ in range(n)]
        for w in words:
            if w:
                B[index[w[:-1]]][index[w]] = -field.eta(w[-1])
        return cls.make(field, B, labels=words)

    @classmethod
    def kz(cls, field, matrices: dict):
        """``B = sum_a N_a eta_a`` for strictly upper triangular constant matrices ``N_a``."""
        n = len(next(iter(matrices.values())))
        B = [[field.K.zero] * n for _ in range(n)]
        for a, N in matrices.items():
            for i in range(n):
                for j in range(n):
                    if N[i][j]:
                        B[i][j] = B[i][j] + field.const(N[i][j]) * field.eta(a)
        return cls.make(field, B)

    # -- operations -----------------------------------------------------------
    def nabla(self, x):
        """``dz`` coefficient of ``nabla(x)`` for a row vector ``x`` over K."""
        F, n = self.field, self.rank
        return [F.diff(x[j]) + sum((x[i] * self.B[i][j] for i in range(n)), F.K.zero)
                for j in range(n)]

    def direct_sum(self, other):
        F = self.field
        n, m = self.rank, other.rank
        B = [[F.K.zero] * (n + m) for _ in range(n + m)]
        for i in range(n):
            B[i][:n] = list(self.B[i])
        for i in range(m):
            B[n + i][n:] = list(other.B[i])
        labels = [("L", l) for l in self.labels] + [("R", l) for l in other.labels]
        return UnipotentConnection.make(F, B, labels=labels)

    def tensor(self, other):
        """``B1 (x) I + I (x) B2`` in the lexicographic basis ``e_i (x) f_k``."""
        F = self.field
        n, m = self.rank, other.rank
        B = [[F.K.zero] * (n * m) for _ in range(n * m)]
        for i in range(n):
            for k in range(m):
                for j in range(n):
                    if not F.is_zero(self.B[i][j]):
                        B[i * m + k][j * m + k] = B[i * m + k][j * m + k] + self.B[i][j]
                for l in range(m):
                    if not F.is_zero(other.B[k][l]):
                        B[i * m + k][i * m + l] = B[i * m + k][i * m + l] + other.B[k][l]
        labels = [(a, b) for a in self.labels for b in other.labels]
        return UnipotentConnection.make(F, B, labels=labels)

    def is_stable(self, V) -> bool:
        """Whether the row span of ``V`` is preserved by ``nabla``."""
        F, n = self.field, self.rank
        if not V:
            return True
        base, _ = _rref_rows(F, V, n)
        for v in V:
            w = self.nabla(v)
            ext, _ = _rref_rows(F, base + [w], n)
            if len(ext) > len(base):
                return False
        return True

    def quotient(self, V):
        """Quotient by the stable row span of ``V``; returns ``(connection, project, keep)``.

        The complement is spanned by the standard vectors at the non-pivot
        columns of the reduced echelon form of ``V``; ``project`` maps a row
        vector to its coordinates there.
        """
        F, n = self.field, self.rank
        rows, piv = _rref_rows(F, V, n)
        keep = [j for j in range(n) if j not in piv]

        def project(x):
            x = list(x)
            for r, pc in zip(rows, piv):
                c = x[pc]
                if not F.is_zero(c):
                    x = [xi - c * ri for xi, ri in zip(x, r)]
            return [x[j] for j in keep]

        B = [project(self.B[j]) for j in keep]
        labels = [self.labels[j] for j in keep]
        return UnipotentConnection.make(F, B, labels=labels), project, keep

    # -- serialization ----------------------------------------------------------
    def to_json(self) -> dict:
        F = self.field
        return {"rank": self.rank,
                "B": [[None if F.is_zero(c) else F.canonical_key(c) + " dz" for c in row]
                      for row in self.B],
                "filtration": list(self.filtration)}

    @classmethod
    def from_json(cls, field, data: dict):
        n = data["rank"]
        B = [[field.K.zero if c is None else field.parse(c) for c in row] for row in data["B"]]
        if len(B) != n:
            raise ValueError("rank does not match the matrix")
        return cls.make(field, B, filtration=data.get("filtration"))


def _blocks(field, B):
    """Block sizes of the filtration by nilpotency depth (lengths of the unipotent filtration)."""
    n = len(B)
    depth = [0] * n
    for j in range(n):
        for i in range(j):
            if not field.is_zero(B[i][j]):
                depth[j] = max(depth[j], depth[i] + 1)
    sizes = [0] * (max(depth, default=-1) + 1)
    for d in depth:
        sizes[d] += 1
    return tuple(sizes)


def iota_stabilize(M: UnipotentConnection, A) -> list:
    """Largest nabla-stable subspace of the row span of ``A``, as reduced echelon rows.

    Iterates ``A_{k+1} = {a in A_k : nabla(a) in A_k}``.  For a basis ``V`` of
    ``A_k`` and ``a = c V`` one has ``nabla(a) = dc V + c (dV + V B)``, so the
    condition is linear in ``c``: ``c W Q = 0`` with ``W = dV + V B`` and ``Q``
    spanning the annihilator of ``A_k``.
    """
    F, n = M.field, M.rank
    V, _ = _rref_rows(F, A, n)
    while V:
        Q = _nullspace_rows(F, V, n)
        if not Q:
            return V
        W = [M.nabla(v) for v in V]
        # constraint matrix (k x m): (W Q^T)
        WQ = [[sum((w[i] * q[i] for i in range(n)), F.K.zero) for q in Q] for w in W]
        # c with c (WQ) = 0  <=>  (WQ)^T c^T = 0
        WQt = [[WQ[r][c] for r in range(len(WQ))] for c in range(len(Q))]
        C = _nullspace_rows(F, WQt, len(V))
        if len(C) == len(V):
            return V
        newV = [[sum((c[r] * V[r][j] for r in range(len(V))), F.K.zero) for j in range(n)]
                for c in C]
        V, _ = _rref_rows(F, newV, n)
    return []


def kernel_rows(F: FunctionField, s) -> list:
    """Row vectors ``x`` with ``x . s = 0``."""
    return _nullspace_rows(F, [list(s)], len(s))


def _a_rank(F, rows):
    """Rank over A of constant rows."""
    rows = [r for r in rows if any(c != F.A.zero for c in r)]
    if not rows:
        return 0
    return DomainMatrix([list(r) for r in rows], (len(rows), len(rows[0])), F.A).rank()


@dataclass
class AbstractColemanFunction:
    """Triple ``(M, s, y)``: the function ``z -> x(z) . s(z)`` where ``x`` is horizontal with ``x(b) = y``.

    ``s`` is a column of K elements, ``y`` a row of exact constants (elements
    of ``A``) at the Teichmüller center of class ``base``.
    """

    M: UnipotentConnection
    s: tuple
    y: tuple
    base: int

    def __post_init__(self):
        F = self.M.field
        self.s = tuple(F.const(c) if isinstance(c, (int, Fraction)) else c for c in self.s)
        self.y = tuple(F.const_to_A(c) if isinstance(c, (int, Fraction)) else c for c in self.y)
        self.base %= F.p
        if len(self.s) != self.M.rank or len(self.y) != self.M.rank:
            raise ValueError("s and y must have the rank of the connection")

    @property
    def field(self):
        return self.M.field

    def __add__(self, other):
        return AbstractColemanFunction(self.M.direct_sum(other.M), self.s + other.s,
                                       self.y + other.y, self.base)

    def __neg__(self):
        return AbstractColemanFunction(self.M, tuple(-c for c in self.s), self.y, self.base)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Tensor product ``(M1 (x) M2, s1 (x) s2, y1 (x) y2)``."""
        M = self.M.tensor(other.M)
        s = tuple(a * b for a in self.s for b in other.s)
        y = tuple(a * b for a in self.y for b in other.y)
        return AbstractColemanFunction(M, s, y, self.base)

    def to_json(self) -> dict:
        F = self.field
        return {"connection": self.M.to_json(),
                "s": [F.to_literal(c) for c in self.s],
                "y": [F.to_literal(F.from_A(c)) for c in self.y],
                "base": self.base}


def zero_test(f: AbstractColemanFunction) -> bool:
    """Whether ``f`` vanishes: ``y`` lies in the fiber at the base of ``iota(ker s)``."""
    F = f.field
    V = iota_stabilize(f.M, kernel_rows(F, f.s))
    if all(c == F.A.zero for c in f.y):
        return True
    if not V:
        return False
    fiber = _fiber_at_center(F, V, f.base)
    return _a_rank(F, fiber + [list(f.y)]) == len(fiber)


def _fiber_at_center(F, V, r):
    """Fiber at the center of class ``r`` of the subbundle spanned by ``V``.

    Rows are cleared of poles at the center (scaled by a power of ``z - a``)
    and a saturation step keeps the fiber of full rank.
    """
    lin = F.K.one * (F.z - F.from_A(F.teich(r)))
    rows = [list(v) for v in V]
    for _ in range(4 * len(V) + 8):
        vals = []
        for i, v in enumerate(rows):
            while True:
                try:
                    vals.append([F.evaluate_at_teich(c, r) for c in v])
                    break
                except ZeroDivisionError:
                    v = [c * lin for c in v]
                    rows[i] = v
        if _a_rank(F, vals) == len(rows):
            return vals
        # a relation among values at the center: divide the combination by (z - a)
        rel = DomainMatrix([list(x) for x in vals], (len(vals), len(vals[0])), F.A)
        ker = rel.transpose().nullspace()
        c = [ker[0, i].element for i in range(len(rows))]
        k = max(i for i, ci in enumerate(c) if ci != F.A.zero)
        combo = [sum((F.from_A(c[i]) * rows[i][j] for i in range(len(rows))), F.K.zero)
                 for j in range(len(rows[0]))]
        rows[k] = [x / lin for x in combo]
    raise ArithmeticError("could not saturate the subbundle at the center")


# -- exact normal forms ----------------------------------------------------------

@dataclass
class ExactColemanFunction:
    """``sum_w terms[w] I_w`` with coefficients in K, based at the center of class ``base``."""

    calc: ExactCalculus
    terms: dict

    def __post_init__(self):
        F = self.calc.F
        self.terms = {tuple(w): c for w, c in sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))
                      if not F.is_zero(c)}

    @property
    def field(self):
        return self.calc.F

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return ExactColemanFunction(self.calc, out)

    def __neg__(self):
        return ExactColemanFunction(self.calc, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, g):
        return ExactColemanFunction(self.calc, {w: c * g for w, c in self.terms.items()})

    def d(self) -> dict:
        return self.calc.d(self.terms)

    def key(self) -> tuple:
        F = self.field
        return tuple((w, F.to_literal(c)) for w, c in self.terms.items())

    def to_engine(self, engine):
        """The same function as an engine-level :class:`ColemanFunction`."""
        from .engine import ColemanFunction
        F = self.field
        return ColemanFunction.make(engine, {w: F.to_function(c, engine.poles)
                                             for w, c in self.terms.items()})

    @classmethod
    def from_engine(cls, calc: ExactCalculus, f):
        F = calc.F
        return cls(calc, {w: F.from_function(g) for w, g in f.terms.items()})


def horizontal_frame(M: UnipotentConnection, calc: ExactCalculus):
    """Global horizontal frame ``Y`` with ``Y(b) = I`` as exact word expansions.

    ``Y_ij = int_b (-sum_{i <= k < j} Y_ik B_kj)`` in increasing ``j - i``.
    """
    F, n = M.field, M.rank
    Y = [[{} for _ in range(n)] for _ in range(n)]
    for i in range(n):
        Y[i][i] = {(): F.K.one}
        for j in range(i + 1, n):
            integrand: dict = {}
            for k in range(i, j):
                b = M.B[k][j]
                if F.is_zero(b) or not Y[i][k]:
                    continue
                for w, c in Y[i][k].items():
                    integrand[w] = integrand.get(w, F.K.zero) - c * b
            Y[i][j] = calc.primitive(integrand) if integrand else {}
            Y[i][j] = {w: c for w, c in Y[i][j].items() if not F.is_zero(c)}
    return Y


def from_abstract(f: AbstractColemanFunction, calc: ExactCalculus) -> ExactColemanFunction:
    """Normal form ``sum_w g_w I_w`` of ``z -> y Y(z) s(z)``."""
    F, n = f.field, f.M.rank
    Y = horizontal_frame(f.M, calc)
    out: dict = {}
    for i in range(n):
        if f.y[i] == F.A.zero:
            continue
        yi = F.from_A(f.y[i])
        for j in range(i, n):
            sj = f.s[j]
            if F.is_zero(sj):
                continue
            for w, c in Y[i][j].items():
                out[w] = out.get(w, F.K.zero) + yi * c * sj
    return ExactColemanFunction(calc, out)


def _prefix_closure(words):
    out = {()}
    for w in words:
        for k in range(len(w) + 1):
            out.add(tuple(w[:k]))
    return sorted(out, key=lambda v: (len(v), v))


def to_abstract(f: ExactColemanFunction) -> AbstractColemanFunction:
    """Word connection on the prefix closure of the support, ``s`` the coefficients, ``y = e_()``."""
    F = f.field
    words = _prefix_closure(f.terms)
    M = UnipotentConnection.word_connection(F, words)
    s = tuple(f.terms.get(w, F.K.zero) for w in M.labels)
    y = tuple(F.A.one if w == () else F.A.zero for w in M.labels)
    return AbstractColemanFunction(M, s, y, f.calc.base)


@dataclass(frozen=True)
class CanonicalForm:
    rank: int
    labels: tuple
    B: tuple
    s: tuple
    y: tuple

    def to_json(self) -> dict:
        return {"rank": self.rank, "labels": [list(l) for l in self.labels],
                "B": [list(r) for r in self.B], "s": list(self.s), "y": list(self.y)}


def minimal_representative(f: AbstractColemanFunction, calc: ExactCalculus):
    """Minimal subquotient triple of ``f`` and its canonical form.

    The function is brought to normal form; on the prefix closure of its
    support the horizontal section through ``e_()`` is not contained in any
    proper sub-connection (the ``I_w`` are independent over K), so only the
    quotient by ``iota(ker s)`` remains.  The complement basis is fixed by the
    reduced echelon pivots.
    """
    F = f.field
    normal = from_abstract(f, calc)
    if normal.is_zero():
        M0 = UnipotentConnection.make(F, [])
        return AbstractColemanFunction(M0, (), (), f.base), CanonicalForm(0, (), (), (), ())
    g = to_abstract(normal)
    V = iota_stabilize(g.M, kernel_rows(F, g.s))
    Mq, project, keep = g.M.quotient(V)
    s = tuple(g.s[j] for j in keep)
    yK = project([F.from_A(c) for c in g.y])
    y = tuple(F.evaluate_at_teich(c, f.base) for c in yK)
    out = AbstractColemanFunction(Mq, s, y, f.base)
    canon = CanonicalForm(
        Mq.rank, tuple(Mq.labels),
        tuple(tuple(F.to_literal(c) for c in row) for row in Mq.B),
        tuple(F.to_literal(c) for c in s),
        tuple(F.to_literal(F.from_A(c)) for c in y))
    return out, canon


# -- local frames and transport -----------------------------------------------------

def local_horizontal_frame(M: UnipotentConnection, r: int, poles: PoleSet,
                           degree: int | None = None):
    """Frame ``Y_c`` on the disc of class ``r`` with ``Y_c(c) = I`` and ``dY_c = -Y_c B``.

    Entries are :class:`DiscSeries` in ``t = z - c``, built by integrating
    ``dY_ij = -sum_{i <= k < j} Y_ik B_kj`` with zero constant term.
    """
    F, n = M.field, M.rank
    D = poles.series_degree if degree is None else degree
    c = poles.lift(r)
    p = poles.p
    Bexp = {}
    for k in range(n):
        for j in range(k + 1, n):
            if not F.is_zero(M.B[k][j]):
                Bexp[k, j] = F.to_function(M.B[k][j], poles).expand_at(r, D)
    Y = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            Y[i][j] = DiscSeries.constant(p, c, ONE if i == j else ZERO, D)
        for j in range(i + 1, n):
            acc = DiscSeries.constant(p, c, ZERO, D)
            for k in range(i, j):
                if (k, j) in Bexp:
                    acc = acc - Y[i][k] * Bexp[k, j]
            Y[i][j] = acc.formal_integral()
    return Y


def _unipotent_inverse(Y):
    """Inverse of a unipotent upper triangular matrix by back substitution."""
    n = len(Y)
    X = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            acc = ZERO
            for k in range(i + 1, j + 1):
                acc = acc + Y[i][k] * X[k][j]
            X[i][j] = -acc
    return X


def matmul(A, B):
    n, m, l = len(A), len(B), len(B[0]) if B else 0
    return [[sum((A[i][k] * B[k][j] for k in range(m)), ZERO) for j in range(l)] for i in range(n)]


class Transporter:
    """Transport matrices of a connection between Teichmüller centers.

    The global frame ``Y`` (``Y(b) = I``) is expanded exactly in iterated
    integrals and evaluated through the engine's Frobenius-determined center
    values; then ``A_{x,y} = Y(x)^{-1} Y(y)`` carries a horizontal row from
    ``x`` to ``y``: ``v_y = v_x A_{x,y}``.
    """

    def __init__(self, M: UnipotentConnection, engine):
        self.M = M
        self.engine = engine
        F = M.field
        self.calc = ExactCalculus(F, engine.poles.finite, engine.base)
        Yexact = horizontal_frame(M, self.calc)
        self.Y = [[ExactColemanFunction(self.calc, e).to_engine(engine) for e in row]
                  for row in Yexact]
        self._at = {}

    def frame_at(self, r):
        r %= self.engine.p
        if r not in self._at:
            z = self.engine.poles.lift(r)
            self._at[r] = [[self.engine.evaluate_theta(e, z) for e in row] for row in self.Y]
        return self._at[r]

    def transport(self, x, y):
        return matmul(_unipotent_inverse(self.frame_at(x)), self.frame_at(y))


def transport_matrix(M: UnipotentConnection, x: int, y: int, engine):
    return Transporter(M, engine).transport(x, y)
