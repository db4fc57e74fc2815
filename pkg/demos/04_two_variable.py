"""
Iterated integrals in both endpoints
====================================

f_k(S, z) is the integral of a word from S to z. Its differential is a closed
form Omega_k built from shorter integrals, and it vanishes on the diagonal.
"""
from unicol.connections import FunctionField
from unicol.engine import ColemanEngine, engine_precision
from unicol.overconvergent import PoleSet
from unicol.twovar import TwoVarField, check_two_variable, curvature, e_int_two_var

p = 7
engine = ColemanEngine(PoleSet(p, [0, 1, "inf"], prec=engine_precision(12, 3)), 3,
                       max_word_length=3)

for word in [(0,), (1, 0), (0, 1, 1)]:
    rep = check_two_variable(engine, word, 2, 5, 10)
    print(word, "df = Omega to", min(rep["df_dS"], rep["df_dz"]), "digits;",
          "dOmega = 0:", rep["d_omega_exact"], "; f(S, S) = 0 to", rep["diagonal"], "digits")

# Curvature of a rank two connection in two variables: z dS + S dz is closed,
# z dS alone is not, and then only the horizontal line survives
T = TwoVarField(FunctionField(p, 24))
S, z, zero = T.gS, T.gz, T.K.zero
BS = [[zero, z], [zero, zero]]
print("flat:", all(T.is_zero(c) for row in curvature(T, BS, [[zero, S], [zero, zero]]) for c in row))
print("integrable core rank:", len(e_int_two_var(T, BS, [[zero, zero], [zero, zero]])))
