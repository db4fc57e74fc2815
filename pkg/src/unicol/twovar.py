"""Iterated integrals as functions of both endpoints.

``f_k(S, z) = int_S^z eta_{a_1} o ... o eta_{a_k}`` is assembled from
one-variable data by composing paths through the base point ``b``::

    f_k(S, z) = sum_j (-1)**j I_{rev(w[:j])}(S) I_{w[j:]}(z)

since ``int_S^b`` of a word is ``(-1)**len`` times the reversed word from ``b``
to ``S``.  Expansions live on a product of residue discs in ``s = S - c_S``
and ``t = z - c_z``.

The closed form ``Omega_k`` has ``dz`` part ``f_{k-1}(a_1..a_{k-1}) g_k(z)``
and ``dS`` part ``-f_{k-1}(a_2..a_k) g_1(S)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy as sp

from .connections import FunctionField, _nullspace_rows, _rref_rows
from .engine import ColemanEngine, _agreement
from .padic import INF
from .series import BivariateSeries, DiscSeries

ONE = Fraction(1)


@dataclass(frozen=True)
class TwoVarForm:
    """``g_S dS + g_z dz`` on a product disc."""

    g_S: BivariateSeries
    g_z: BivariateSeries

    def d(self) -> BivariateSeries:
        """Coefficient of ``dS ^ dz`` in the exterior derivative."""
        return self.g_z.d_s() - self.g_S.d_t()


def _series(engine: ColemanEngine, word, r, D) -> DiscSeries:
    return engine.local_expansion(tuple(word), r, D)


def _coeff_series(engine, a, r, D) -> DiscSeries:
    return engine.eta_coeff(a).expand_at(r, D)


def f_k_two_var(engine: ColemanEngine, word, rS: int, rz: int, degree: int) -> BivariateSeries:
    """Expansion of ``int_S^z`` of ``word`` on the product of the discs ``rS`` and ``rz``."""
    word = tuple(word)
    D = degree
    total = None
    for j in range(len(word) + 1):
        left = _series(engine, tuple(reversed(word[:j])), rS, D)
        if j % 2:
            left = -left
        right = _series(engine, word[j:], rz, D)
        term = BivariateSeries.outer(left, right)
        total = term if total is None else total + term
    return total



def omega_k(engine: ColemanEngine, word, rS: int, rz: int, degree: int) -> TwoVarForm:
    """``Omega_k = f_{k-1}(w[:-1]) g_k(z) dz - f_{k-1}(w[1:]) g_1(S) dS``."""
    word = tuple(word)
    D = degree
    cS, cz = engine.poles.lift(rS), engine.poles.lift(rz)
    head = f_k_two_var(engine, word[:-1], rS, rz, D)
    tail = f_k_two_var(engine, word[1:], rS, rz, D)
    gk = BivariateSeries.outer(DiscSeries.constant(engine.p, cS, ONE, D),
                               _coeff_series(engine, word[-1], rz, D))
    g1 = BivariateSeries.outer(_coeff_series(engine, word[0], rS, D),
                               DiscSeries.constant(engine.p, cz, ONE, D))
    return TwoVarForm(-(tail * g1), head * gk)


def _min_agreement(series: BivariateSeries, upto: int) -> float:
    worst = INF
    for i in range(upto + 1):
        for j in range(upto + 1):
            worst = min(worst, _agreement(series.coeffs[i][j], series.p))
    return worst


def _all_zero(series: BivariateSeries, upto: int) -> bool:
    """Every coefficient vanishes to the precision it carries."""
    for i in range(upto + 1):
        for j in range(upto + 1):
            c = series.coeffs[i][j]
            if not (c.is_zero() if hasattr(c, "is_zero") else c == 0):
                return False
    return True


def check_two_variable(engine: ColemanEngine, word, rS: int, rz: int, degree: int) -> dict:
    """Digits of agreement for ``df_k = Omega_k``, ``dOmega_k = 0`` and ``f_k(S, S) = 0``.

    Coefficients are compared for indices below ``degree`` in each variable,
    where differentiation does not reach the truncation.
    """
    D = degree
    f = f_k_two_var(engine, word, rS, rz, D)
    om = omega_k(engine, word, rS, rz, D)
    upto = D - 1
    rep = {
        "word": list(word),
        "discs": [rS, rz],
        "df_dS": _min_agreement(f.d_s() - om.g_S, upto),
        "df_dz": _min_agreement(f.d_t() - om.g_z, upto),
        "d_omega": _min_agreement(om.d(), upto - 1),
        "d_omega_exact": _all_zero(om.d(), upto - 1),
    }
    diag = f_k_two_var(engine, word, rS, rS, D).restrict_diagonal()
    rep["diagonal"] = min((_agreement(c, engine.p) for c in diag.coeffs), default=INF)
    return rep


# -- curvature and the integrable core ---------------------------------------------

class TwoVarField:
    """``Q(zeta)(S, z)`` with partial derivatives."""

    def __init__(self, field: FunctionField):
        self.base = field
        self.S, self.Z = sp.symbols("S z")
        self.K = field.A.frac_field(self.S, self.Z)
        self.gS, self.gz = self.K.gens
        self.R = self.K.field.ring
        self.xS, self.xz = self.R.gens

    def diff(self, e, var: str):
        x = self.xS if var == "S" else self.xz
        F = self.K.field
        n, d = e.numer, e.denom
        return (F(n.diff(x)) * F(d) - F(n) * F(d.diff(x))) / (F(d) ** 2)

    def teich(self, r):
        return self.K.convert_from(self.base.teich(r), self.base.A)

    def is_zero(self, e) -> bool:
        return self.K.is_zero(e)


def curvature(T: TwoVarField, BS, Bz):
    """``dS ^ dz`` coefficient of ``dB - B ^ B`` for the row convention ``nabla x = dx + x B``."""
    n = len(BS)
    R = [[T.K.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            acc = T.diff(Bz[i][j], "S") - T.diff(BS[i][j], "z")
            for k in range(n):
                acc = acc - BS[i][k] * Bz[k][j] + Bz[i][k] * BS[k][j]
            R[i][j] = acc
    return R


def e_int_two_var(T: TwoVarField, BS, Bz) -> list:
    """Largest nabla-stable subspace of ``{x : x R = 0}``, as reduced echelon rows."""
    n = len(BS)
    R = curvature(T, BS, Bz)
    Rt = [[R[i][j] for i in range(n)] for j in range(n)]
    V = _nullspace(T, Rt, n)
    V, _ = _rref_rows(_Shim(T), V, n) if V else ([], ())
    while V:
        Q = _nullspace(T, V, n)
        if not Q:
            return V
        cols = []
        for B, var in ((BS, "S"), (Bz, "z")):
            W = [[T.diff(v[j], var) + sum((v[i] * B[i][j] for i in range(n)), T.K.zero)
                  for j in range(n)] for v in V]
            for q in Q:
                cols.append([sum((w[i] * q[i] for i in range(n)), T.K.zero) for w in W])
        C = _nullspace(T, cols, len(V))
        if len(C) == len(V):
            return V
        newV = [[sum((c[r] * V[r][j] for r in range(len(V))), T.K.zero) for j in range(n)]
                for c in C]
        V, _ = _rref_rows(_Shim(T), newV, n)
    return []


class _Shim:
    """Duck-typed field so the one-variable echelon helpers work over ``K(S, z)``."""

    def __init__(self, T):
        self.K = T.K

    def is_zero(self, e):
        return self.K.is_zero(e)


def _nullspace(T, rows, n):
    return _nullspace_rows(_Shim(T), rows, n)
