# The modular group PSL2(Z) = C2 * C3: its critical probability is an
# algebraic number, the unique root in (0, 1) of an integer polynomial.

# %%
from fractions import Fraction

from freeperc import Cyclic, FreeProduct, chi, pc_numeric, pc_polynomial
from freeperc.poly import isolate_roots_01

psl2z = FreeProduct([Cyclic(2), Cyclic(3)])

# %% expected cluster sizes inside each factor
# C2 is a double edge, so chi = 1 + 2p - p^2; the triangle gives chi - 1 = 2p(1 + p - p^2)
p = Fraction(1, 2)
print("chi_C2(1/2) =", chi(Cyclic(2), p))
print("chi_C3(1/2) =", chi(Cyclic(3), p))

# %% the polynomial and a certified root bracket
poly = pc_polynomial(psl2z)
print("polynomial:", poly)
[root] = isolate_roots_01(poly, tol=1e-15)
print("root bracket:", root.bracket_low, "..", root.bracket_high)
print("p_c ~", root.refined_value)

# %% the same number by bisection on the criticality function
print("bisection:", pc_numeric(psl2z, tol=1e-13))
