"""Bond percolation on Cayley graphs of free products of groups."""

from .bounds import (
    approximation_experiment,
    bounds_report,
    cheeger_strictness_check,
    cyclic_family,
    lower_bound_est1,
)
from .errors import FreePercError
from .factors import (
    Cyclic,
    ExplicitFinite,
    FiniteCayleyGraph,
    Free,
    GroupFactor,
    Integers,
    chi,
    chi_closed_form,
    chi_exact_oracle,
    chi_prime,
    cluster_distribution,
    walk_through,
)
from .simulator import (
    SimulationConfig,
    SimulationEstimate,
    estimate_mean_cluster,
    estimate_theta,
    explore_cluster,
)
from .solver import (
    FreeProduct,
    einv_left_derivative_at_pc,
    expected_cluster_size,
    fixed_point_gap,
    p_exp,
    pc_numeric,
    pc_polynomial,
    theta,
)

__version__ = "0.1.0"
