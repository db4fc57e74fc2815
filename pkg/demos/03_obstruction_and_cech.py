"""
The obstruction operator and a two-open cover
=============================================

For a Coleman function of degree one, dbar records which classes [eta_a]
appear with which coefficient. Functions with vanishing obstruction are
rational; on a cover by two opens the Čech square commutes.
"""
from unicol.connections import ExactCalculus, ExactColemanFunction, FunctionField
from unicol.dbar import CechCover, dbar, dbar_kernel_witness, diagram_check
from unicol.engine import ColemanEngine
from unicol.overconvergent import PoleSet

p = 5
F = FunctionField(p, 24)
calc = ExactCalculus(F, letters=(0, 1), base=3)
z = F.z

# dbar(z^2 I_(0) + I_(1)) = -[eta_0] (x) z^2 - [eta_1] (x) 1
f = ExactColemanFunction(calc, {(0,): z ** 2, (1,): F.K.one})
print("dbar:", dbar(f).to_json())

# (eta_0 + dh) integrated against f, minus eta_0 against f: the classes cancel,
# and the function is the rational h - h(b) times f
h = 1 / (z - 1) ** 2
pairs = [(F.eta(0) + F.diff(h), z), (F.eta(0), -z)]
print("kernel witness:", F.to_literal(dbar_kernel_witness(calc, pairs)))

# Cover X by U_1 = X minus disc(2) and U_2 = X minus disc(3), base in disc(4)
poles = PoleSet(p, [0, 1, "inf"], prec=24)
cover = CechCover(poles, 2, 3, 4)
h1 = 1 / (z - F.from_A(F.teich(2)))
h2 = z / (z - F.from_A(F.teich(3))) ** 2
engine = ColemanEngine(cover.restricted_poles("12"), 4, max_word_length=2)
points = [engine.poles.lift(4) + 5 * k for k in (1, 2, 3)]
report = diagram_check(cover, 0, h1, h2, z + 2, engine, points)
print("square commutes exactly:", report["exact"], " numeric digits:", report["agreement"])
