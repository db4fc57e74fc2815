"""The obstruction operator on degree one Coleman functions and the Čech map on two-open covers.

Coefficients are taken in the sheaf of overconvergent functions, so a
degree one Coleman function on ``X`` is ``sum_a f_a I_(a) + g`` with ``f_a, g``
in K.  ``H^1`` of ``X`` has the basis ``[eta_a]`` over the removed finite
centers; a class in ``H^1 (x) O`` is stored as its coefficient dict.

Sign convention: for the extension ``M_B`` with ``B = [[0, -dF], [0, 0]]``,
``y = (1, F)`` and ``s = (0, f)``, lifting the quotient generator to ``(1, 0)``
and applying the connection gives ``(0, -dF)``, so ``dbar(F f) = -[dF] (x) f``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .connections import (AbstractColemanFunction, ExactCalculus, ExactColemanFunction,
                          FunctionField, UnipotentConnection, to_abstract, zero_test)
from .overconvergent import PoleSet
from .engine import _agreement
from .padic import INF
from .series import DomainError


@dataclass(frozen=True)
class DbarClass:
    """``sum_a [eta_a] (x) coeffs[a]``; the ``[eta_a]`` are independent, so this is canonical."""

    field: FunctionField
    coeffs: tuple  # sorted ((a, K element), ...), zero entries dropped

    @classmethod
    def make(cls, field, coeffs: dict):
        clean = tuple(sorted((a, c) for a, c in coeffs.items() if not field.is_zero(c)))
        return cls(field, clean)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def key(self) -> tuple:
        return tuple((a, self.field.to_literal(c)) for a, c in self.coeffs)

    def __eq__(self, other):
        return isinstance(other, DbarClass) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __add__(self, other):
        out = self.as_dict()
        for a, c in other.coeffs:
            out[a] = out[a] + c if a in out else c
        return DbarClass.make(self.field, out)

    def __neg__(self):
        return DbarClass(self.field, tuple((a, -c) for a, c in self.coeffs))

    def to_json(self) -> dict:
        return {str(a): self.field.to_literal(c) for a, c in self.coeffs}


def form_class(calc: ExactCalculus, omega) -> dict:
    """Cohomology class of ``omega dz`` in the ``[eta_a]`` basis."""
    residues, _ = calc.reduce(omega)
    F = calc.F
    return {a: F.from_A(c) for a, c in residues.items()}


def dbar(f: ExactColemanFunction) -> DbarClass:
    """``dbar(sum_a f_a I_(a) + g) = -sum_a [eta_a] (x) f_a``."""
    if any(len(w) > 1 for w in f.terms):
        raise DomainError("dbar is defined on functions of degree at most one")
    return DbarClass.make(f.field, {w[0]: -c for w, c in f.terms.items() if len(w) == 1})


def dbar_of_products(calc: ExactCalculus, pairs) -> DbarClass:
    """``dbar(sum_j f_j int omega_j) = -sum_j [omega_j] (x) f_j`` for pairs ``(omega_j, f_j)``."""
    out: dict = {}
    for omega, f in pairs:
        for a, c in form_class(calc, omega).items():
            out[a] = out[a] - c * f if a in out else -c * f
    return DbarClass.make(calc.F, out)


def dbar_extension(f: AbstractColemanFunction) -> DbarClass:
    """The extension recipe on a rank two triple with ``y_1 = 1``.

    The sub-object is ``{(0, *)}``; lifting the quotient generator to ``(1, 0)``
    and applying the connection gives ``(0, B_12)``, whose class is paired with
    the restriction ``s_2`` of the functional.
    """
    M = f.M
    F = f.field
    if M.rank != 2 or f.y[0] != F.A.one:
        raise DomainError("extension recipe needs a rank two triple with y_1 = 1")
    calc = ExactCalculus(F, _letters_of(M), f.base)
    out: dict = {}
    for a, c in form_class(calc, M.B[0][1]).items():
        out[a] = c * f.s[1]
    return DbarClass.make(F, out)


def _letters_of(M):
    F = M.field
    letters = set()
    for row in M.B:
        for c in row:
            if F.is_zero(c):
                continue
            for r in range(F.p):
                lin = F.x - F.ring(F.teich(r))
                if not divmod(c.denom, lin)[1]:
                    letters.add(r)
    return sorted(letters)


def normal_form_of_products(calc: ExactCalculus, pairs, g=None) -> ExactColemanFunction:
    """``sum_j f_j int_b omega_j + g`` in normal form."""
    F = calc.F
    total = ExactColemanFunction(calc, {(): g} if g is not None else {})
    for omega, f in pairs:
        prim = calc.primitive({(): omega})
        total = total + ExactColemanFunction(calc, prim).scale(f)
    return total


def dbar_kernel_witness(calc: ExactCalculus, pairs, g=None):
    """Witness ``h`` in K with ``f = h`` when ``dbar(f) = 0``, else ``None``.

    Each ``omega_j = sum_a c_ja eta_a + dh_j``; when ``sum_j c_ja f_j = 0`` for
    every ``a`` the function is ``g + sum_j f_j (h_j - h_j(b))``.  The witness
    is certified by the zero test on ``f - h``.
    """
    F = calc.F
    if not dbar_of_products(calc, pairs).is_zero():
        return None
    h = g if g is not None else F.K.zero
    for omega, f in pairs:
        _, hj = calc.reduce(omega)
        hb = F.from_A(F.evaluate_at_teich(hj, calc.base)) if not F.is_zero(hj) else F.K.zero
        h = h + f * (hj - hb)
    diff = normal_form_of_products(calc, pairs, g) - ExactColemanFunction(calc, {(): h})
    if not diff.is_zero() and not zero_test(to_abstract(diff)):
        raise ArithmeticError("kernel witness failed the zero test")
    return h


# -- Čech map on a two-open cover --------------------------------------------------

@dataclass(frozen=True)
class CechCover:
    """``U_i = X`` minus the disc of ``s_i``; the intersection removes both."""

    poles: PoleSet
    s1: int
    s2: int
    base: int

    def __post_init__(self):
        p = self.poles.p
        if self.s1 % p == self.s2 % p:
            raise DomainError("the two removed classes must differ")
        for r in (self.s1, self.s2, self.base):
            if r % p in self.poles.finite:
                raise DomainError(f"class {r} is already removed")
        if self.base % p in (self.s1 % p, self.s2 % p):
            raise DomainError("base point must lie in the intersection")

    @property
    def field(self):
        return FunctionField(self.poles.p, self.poles.prec)

    def letters(self, which: str):
        extra = {"1": [self.s1], "2": [self.s2], "12": [self.s1, self.s2], "X": []}[which]
        return tuple(sorted(set(self.poles.finite) | {e % self.poles.p for e in extra}))

    def calculus(self, which: str = "12") -> ExactCalculus:
        return ExactCalculus(self.field, self.letters(which), self.base)

    def restricted_poles(self, which: str = "12") -> PoleSet:
        return self.poles.with_poles([self.s1, self.s2] if which == "12" else
                                     [self.s1] if which == "1" else [self.s2])


def _check_regular(calc: ExactCalculus, e, what):
    try:
        calc.principal_parts(e)
    except DomainError as exc:
        raise DomainError(f"{what} has poles outside its open set") from exc


def psi(cover: CechCover, omega1, omega2):
    """Cocycle ``f_12 = f_1 - f_2`` in K for compatible classes on ``U_1`` and ``U_2``.

    ``omega_i`` are lists of pairs ``(form, coefficient)`` on ``U_i``.  The lifts
    are ``f_i = sum_j f_j int_b omega_j``; their difference has trivial
    obstruction on ``U_12`` and the kernel witness is returned.
    """
    c1, c2, c12 = cover.calculus("1"), cover.calculus("2"), cover.calculus("12")
    for (w, f) in omega1:
        _check_regular(c1, w, "form on U_1")
        _check_regular(c1, f, "coefficient on U_1")
    for (w, f) in omega2:
        _check_regular(c2, w, "form on U_2")
        _check_regular(c2, f, "coefficient on U_2")
    if dbar_of_products(c12, omega1) != dbar_of_products(c12, omega2):
        raise DomainError("classes do not agree on the intersection")
    F = c12.F
    pairs = list(omega1) + [(w, -f) for w, f in omega2]
    witness = dbar_kernel_witness(c12, pairs)
    if witness is None:
        raise ArithmeticError("difference of lifts has nonzero obstruction")
    return witness


def hypercocycle(cover: CechCover, r: int, h1, h2):
    """Representative ``(eta_1, eta_2, g_12)`` of ``[eta_r]``: ``eta_i = eta_r + dh_i``, ``g_12 = h_1 - h_2``."""
    F = cover.field
    eta1 = F.eta(r) + F.diff(h1)
    eta2 = F.eta(r) + F.diff(h2)
    return eta1, eta2, h1 - h2


def diagram_check(cover: CechCover, r: int, h1, h2, f, engine=None, points=()):
    """Both routes of the square for ``[eta_r] (x) f``.

    Right then down: ``psi`` of the restricted classes.  Down then right: the
    hyper-cocycle ``g_12`` times ``f``.  The cocycles agree up to a constant
    multiple of ``f`` (the choice of integration constants); this is checked
    exactly, and numerically at ``points`` through ``engine`` when given.
    """
    F = cover.field
    if r % F.p not in cover.poles.finite:
        raise DomainError(f"eta_{r} is not a class on X")
    eta1, eta2, g12 = hypercocycle(cover, r, h1, h2)
    c12 = cover.calculus("12")
    if not F.is_zero(F.diff(g12) - (eta1 - eta2)):
        raise ArithmeticError("hyper-cocycle condition fails")
    route_psi = psi(cover, [(eta1, f)], [(eta2, f)])
    route_cocycle = g12 * f
    ratio = (route_psi - route_cocycle) / f
    exact_ok = F.is_zero(F.diff(ratio))
    report = {"exact": exact_ok, "psi": F.to_literal(route_psi),
              "cocycle": F.to_literal(route_cocycle), "agreement": INF}
    if engine is not None and points:
        report["agreement"] = _numeric_routes(cover, engine, eta1, eta2, f, g12, points)
    return report


def _numeric_routes(cover, engine, eta1, eta2, f, g12, points):
    """Evaluate ``(int eta_1 - int eta_2) f - g_12 f`` through the engine; it must be ``c f``."""
    F = cover.field
    poles = engine.poles
    prim1 = engine.coleman_primitive(F.to_form(eta1, poles))
    prim2 = engine.coleman_primitive(F.to_form(eta2, poles))
    ff = F.to_function(f, poles)
    gg = F.to_function(g12, poles)
    vals = []
    for z in points:
        a = engine.evaluate_theta((prim1 - prim2) * ff, z)
        vals.append((a - gg.evaluate(z) * ff.evaluate(z), ff.evaluate(z)))
    d0, f0 = vals[0]
    worst = INF
    for d, fz in vals[1:]:
        diff = d * f0 - d0 * fz
        worst = min(worst, _agreement(diff, engine.p))
    return worst


def dbar_kernel_check(calc: ExactCalculus, pairs, g=None) -> bool:
    """Whether ``sum_j f_j int omega_j + g`` has trivial obstruction (a certified witness exists)."""
    return dbar_kernel_witness(calc, pairs, g) is not None
