# Critical probabilities of C_m * C_n for a grid of orders. The infinite
# column is C_m * Z, which the finite cyclic groups approach quickly.

# %%
import numpy as np

from freeperc import Cyclic, FreeProduct, Integers, pc_numeric

rows = [2, 4, 10]
cols = [2, 3, 4, 5, 10, 100, None]


def factor(n):
    return Integers() if n is None else Cyclic(n)


grid = np.array([[pc_numeric(FreeProduct([factor(m), factor(n)])) for n in cols] for m in rows])

# %%
print("m\\n  " + "  ".join(f"{'inf' if n is None else n:>6}" for n in cols))
for m, row in zip(rows, grid):
    print(f"{m:>4} " + "  ".join(f"{v:6.4f}" for v in row))

# %% the table is symmetric where both orders appear
print("p_c(C2*C4) - p_c(C4*C2) =", grid[0, 2] - grid[1, 0])

# %% larger orders give more room for clusters, so p_c falls toward 1/3
big = [pc_numeric(FreeProduct([Cyclic(n), Cyclic(n)])) for n in (10, 20, 40, 80)]
print("p_c(C_n * C_n), n = 10, 20, 40, 80:", np.round(big, 8))
