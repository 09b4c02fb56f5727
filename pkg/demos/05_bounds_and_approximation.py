# General bounds on p_c and the approach of p_c(C_j * C2) to p_c(Z * C2).

# %%
import numpy as np

from freeperc import Cyclic, FreeProduct, Integers, approximation_experiment
from freeperc import cheeger_strictness_check, cyclic_family

# %% 1/3 < p_c(C_m * C_n) < 1/(h + 1) with the Cheeger-type estimate for h
for m, n in [(2, 3), (2, 4), (3, 3), (4, 10)]:
    r = cheeger_strictness_check(m, n)
    print(f"C{m}*C{n}: {r.lower_est1:.4f} < {r.pc:.4f} < {r.upper_est2_from_bound:.4f}"
          f"  (check value {r.check_value:.4f} at p = {r.check_point:.4f})")

# %% quotient approximation: Z replaced by the cyclic group C_j
target = FreeProduct([Integers(), Cyclic(2)])
res = approximation_experiment(target, cyclic_family(target), [5, 10, 15, 20, 30, 40, 60, 80])
for row in res.rows:
    print(f"j={row.j:3d}  p_c={row.pc_j:.12f}  delta={row.delta_j:.3e}")
print("log-delta slope", round(res.slope, 4), "R^2", round(res.r_squared, 5))

# %% for comparison: a cycle of C_j needs about j open edges to matter, hinting at a rate near log p_c
print("log p_c(Z*C2) =", np.log(res.pc_limit))
