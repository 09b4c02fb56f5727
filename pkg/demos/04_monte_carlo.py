# Cross-check of the analytic mean cluster size and percolation probability
# against direct simulation of bond percolation on the Cayley graph of C2*C3.

# %%
import numpy as np

from freeperc import Cyclic, FreeProduct, SimulationConfig, estimate_mean_cluster, estimate_theta
from freeperc import expected_cluster_size, theta
from freeperc.simulator import run_trials

g = FreeProduct([Cyclic(2), Cyclic(3)])

# %% subcritical: sample mean against prod chi / D
for p in (0.1, 0.2, 0.3, 0.4):
    est = estimate_mean_cluster(g, SimulationConfig(p, trials=20_000, base_seed=1))
    exact = expected_cluster_size(g, p)
    print(f"p={p}  simulated {est.mean:.4f} +- {est.std_error:.4f}  exact {exact:.4f}")

# %% supercritical: survival to the size cap against theta
for p in (0.6, 0.7, 0.8):
    est = estimate_theta(g, SimulationConfig(p, trials=2_000, size_cap=20_000, base_seed=2))
    print(f"p={p}  simulated {est.mean:.4f} +- {est.std_error:.4f}  exact {theta(g, p).theta:.4f}")

# %% the cluster-size tail below p_c decays exponentially
counts, _, _ = run_trials(g, SimulationConfig(0.4, trials=50_000, base_seed=3))
for n in (1, 10, 100, 1000):
    print(f"P(|C| >= {n}) ~ {np.mean(counts >= n):.5f}")
