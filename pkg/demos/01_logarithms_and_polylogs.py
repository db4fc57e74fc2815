"""
Logarithms and iterated integrals on P^1 minus residue discs
============================================================

Remove the residue discs of 0, 1 and infinity from the 5-adic projective
line. On what is left, Coleman integration gives the logarithm and its
iterated versions, normalized to vanish at a Teichmüller base point.
"""
from fractions import Fraction

from unicol.engine import ColemanEngine, engine_precision, log_closed_form, shuffle
from unicol.overconvergent import PoleSet

p = 5
# twelve target digits on words of length up to three
poles = PoleSet(p, [0, 1, "inf"], prec=engine_precision(12, 3))
engine = ColemanEngine(poles, base=3, max_word_length=3)
print("letters:", engine.letters, " centers of X:", poles.centers)

# a point in the disc of teich(2)
z = poles.lift(2) + 5 * 7

# I_(0) is a branch of log(z/b); compare with the closed form
I0 = engine.evaluate_theta(engine.I((0,)), z)
print("I_(0)(z)        ", I0)
print("log_unit(z/b)   ", log_closed_form(engine, 0, z))

# Dilogarithm: -I_(1,0) vanishes at the base point and satisfies dLi2 = -log(1-z) dz/z
Li2 = -engine.evaluate_theta(engine.I((1, 0)), z)
print("Li_2 (normalized at b)", Li2)

# shuffle relation: I_(0) I_(1) = I_(0,1) + I_(1,0)
lhs = engine.evaluate_theta(engine.I((0,)), z) * engine.evaluate_theta(engine.I((1,)), z)
rhs = sum((m * engine.evaluate_theta(engine.I(w), z) for w, m in shuffle((0,), (1,)).items()),
          Fraction(0))
print("shuffle defect  ", lhs - rhs)

# Frobenius equivariance of the dilogarithm on a few points
report = engine.frobenius_equivariance_check(engine.I((1, 0)), [z, poles.lift(4) + 5])
print("Frobenius agreement (digits):", report["min_agreement"])
