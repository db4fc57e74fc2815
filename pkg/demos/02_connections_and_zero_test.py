"""
Unipotent connections and the zero test
=======================================

A Coleman function is a triple (M, s, y): a unipotent connection M over
Q(zeta)(z), a functional s and a horizontal section fixed by its value y at
the base point. Everything below is exact.
"""
from unicol.connections import (AbstractColemanFunction, ExactCalculus, ExactColemanFunction,
                                FunctionField, Transporter, UnipotentConnection,
                                minimal_representative, to_abstract, zero_test)
from unicol.engine import ColemanEngine
from unicol.overconvergent import PoleSet

p = 5
F = FunctionField(p, 24)
calc = ExactCalculus(F, letters=(0, 1), base=3)
z = F.z

# f = (z + 1) I_(1,0) + z^2, written in normal form over K = Q(i)(z)
f = ExactColemanFunction(calc, {(1, 0): z + 1, (): z ** 2})
triple = to_abstract(f)
print("rank of the word connection:", triple.M.rank)
print(triple.M.to_json())

# The same function built as a chain connection for I_(1,0), scaled by z + 1,
# plus a rank one piece for z^2
chain = UnipotentConnection.from_forms(F, [F.eta(1), F.eta(0)])
other = AbstractColemanFunction(chain, (0, 0, z + 1), (1, 0, 0), 3) + \
    AbstractColemanFunction(UnipotentConnection.trivial(F), (z ** 2,), (1,), 3)

# the difference vanishes; the zero test sees it without evaluating anything
print("zero_test(f - f'):", zero_test(triple - other))
print("zero_test(f):     ", zero_test(triple))

# both have the same minimal representative
_, canon_a = minimal_representative(triple, calc)
_, canon_b = minimal_representative(other, calc)
print("same canonical form:", canon_a == canon_b, " rank", canon_a.rank)

# Transport between Teichmüller centers for the connection with B_12 = -dz/(z-1)
engine = ColemanEngine(PoleSet(p, [0, 1, "inf"], prec=20), base=3, max_word_length=2)
T = Transporter(UnipotentConnection.from_forms(F, [F.eta(1)]), engine)
A = T.transport(2, 4)
print("A_{2,4}[0][1] = int_2^4 dz/(z-1):", A[0][1])
