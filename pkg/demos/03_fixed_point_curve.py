# Above p_c the percolation probability comes from the positive root B of
# h(t) = g2(p, g1(p, t)) - t, where g_i is the walk-through function of a
# factor. Here G = C3 * C5: h is concave with h(0) = 0, so it has a
# positive root exactly when h'(0) > 0.

# %%
import numpy as np

from freeperc import Cyclic, FreeProduct, fixed_point_gap, pc_numeric, theta

g = FreeProduct([Cyclic(3), Cyclic(5)])
pc = pc_numeric(g)
print("p_c(C3*C5) =", round(pc, 6))

# %% samples of h on a grid, one curve per p
ts = np.linspace(0, 1, 11)
for p in (0.3, pc, 0.45, 0.6):
    h = [fixed_point_gap(g, p, t) for t in ts]
    print(f"p={p:.4f}  " + " ".join(f"{v:+.3f}" for v in h))

# %% the root and the resulting theta
rep = theta(g, 0.45)
print("B =", rep.fixed_point_B, "A =", rep.fixed_point_A, "theta =", rep.theta)

# %% theta rises from zero at p_c
for p in np.linspace(pc, 1, 8):
    r = theta(g, float(p))
    print(f"{p:.3f}  {r.theta:.5f}  {r.regime}")
