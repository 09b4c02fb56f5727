import math
import random
from fractions import Fraction

import pytest

from freeperc.errors import DegenerateProductError
from freeperc.factors import Cyclic, ExplicitFinite, FiniteCayleyGraph, Free, Integers
from freeperc.poly import P, isolate_roots_01
from freeperc.solver import (
    FreeProduct,
    branching_mean,
    criticality,
    einv_left_derivative_at_pc,
    expected_cluster_size,
    fixed_point_gap,
    p_exp,
    pc_numeric,
    pc_polynomial,
    theta,
)

C2, C3, C4, C5 = Cyclic(2), Cyclic(3), Cyclic(4), Cyclic(5)
Z = Integers()
PSL2Z = FreeProduct([C2, C3])


def tree_theta(d: int, p: float) -> float:
    """Percolation probability on the d-regular tree by direct iteration."""
    q = 0.0
    for _ in range(200_000):
        q_next = (1 - p + p * q) ** (d - 1)
        if abs(q_next - q) < 1e-15:
            break
        q = q_next
    return 1 - (1 - p + p * q) ** d


# critical probability -------------------------------------------------------


def test_polynomials():
    assert pc_polynomial(PSL2Z) == P(-1, 0, 4, 2, -6, 2)
    assert pc_polynomial(FreeProduct([Z, Z])) == P(-1, 2, 3)
    assert pc_polynomial(FreeProduct([C2, C2])) == P(-1, 0, 4, -4, 1)


@pytest.mark.parametrize(
    "factors, expected",
    [
        ([Z, Z], Fraction(1, 3)),
        ([Free(2), Free(3)], Fraction(1, 9)),
        ([Z, Free(2)], Fraction(1, 5)),
        ([Z, Z, Z], Fraction(1, 5)),
        ([C2, C2], Fraction(1)),
    ],
)
def test_pc_closed_cases(factors, expected):
    product = FreeProduct(factors)
    assert abs(pc_numeric(product) - float(expected)) < 1e-9
    exact = pc_numeric(product, exact=True, tol=Fraction(1, 10**30))
    assert abs(exact - expected) <= Fraction(1, 10**30)


@pytest.mark.parametrize("m, n", [(2, 3), (3, 5), (4, 10), (2, 100), (5, 5)])
def test_pc_is_the_polynomial_root(m, n):
    product = FreeProduct([Cyclic(m), Cyclic(n)])
    [root] = isolate_roots_01(pc_polynomial(product), tol=1e-13)
    assert abs(pc_numeric(product, tol=1e-12) - root.refined_value) < 1e-11


def test_criticality_sign_and_symmetry():
    pc = pc_numeric(PSL2Z, tol=1e-12)
    assert criticality(PSL2Z, 0) == 1
    assert criticality(PSL2Z, pc - 1e-3) > 0 > criticality(PSL2Z, pc + 1e-3)
    assert pc_numeric(FreeProduct([C3, C2])) == pytest.approx(pc_numeric(PSL2Z), abs=1e-12)


def test_nested_product_matches_flat():
    nested = FreeProduct([FreeProduct([C2, C3]), C4])
    flat = FreeProduct([C2, C3, C4])
    assert pc_numeric(nested, tol=1e-12) == pytest.approx(pc_numeric(flat, tol=1e-12), abs=1e-11)
    assert expected_cluster_size(nested, 0.2) == pytest.approx(expected_cluster_size(flat, 0.2), rel=1e-12)
    assert nested.flattened() == flat


def test_pc_decreases_when_a_factor_is_added():
    two = pc_numeric(FreeProduct([C3, C4]))
    three = pc_numeric(FreeProduct([C3, C4, C2]))
    assert three < two


def test_explicit_factor_agrees_with_cyclic():
    g = ExplicitFinite(FiniteCayleyGraph.cycle(5))
    assert pc_numeric(FreeProduct([C3, g])) == pytest.approx(pc_numeric(FreeProduct([C3, C5])), abs=1e-12)


# mean cluster size -----------------------------------------------------------


def test_expected_cluster_size_examples():
    assert expected_cluster_size(PSL2Z, 0.2) == pytest.approx(2.3903188628505583, rel=1e-14)
    assert expected_cluster_size(FreeProduct([Z, Z]), Fraction(1, 4)) == 5
    assert expected_cluster_size(PSL2Z, 0) == 1
    assert expected_cluster_size(PSL2Z, 0.6) == math.inf
    assert expected_cluster_size(FreeProduct([C2, C2]), 0.999) < math.inf


@pytest.mark.parametrize("ranks", [(1, 1), (1, 2), (2, 3), (1, 1, 1)])
def test_expected_cluster_size_on_trees(ranks):
    factors = [Integers() if r == 1 else Free(r) for r in ranks]
    d = 2 * sum(ranks)
    for p in (0.01, 0.05, 0.09):
        assert expected_cluster_size(FreeProduct(factors), p) == pytest.approx((1 + p) / (1 - (d - 1) * p), rel=1e-12)


def test_expected_cluster_size_blows_up_linearly():
    pc = pc_numeric(PSL2Z, tol=1e-14)
    vals = [(2.0**-k) * expected_cluster_size(PSL2Z, pc - 2.0**-k) for k in range(5, 21)]
    assert all(v > 0 for v in vals)
    assert abs(vals[-1] - vals[-2]) < 1e-4 * vals[-1]


def test_left_derivative():
    d = einv_left_derivative_at_pc(PSL2Z)
    pc = pc_numeric(PSL2Z, tol=1e-14)
    h = 1e-6
    fd = (1 / expected_cluster_size(PSL2Z, pc - h) - 1 / expected_cluster_size(PSL2Z, pc - 2 * h)) / h
    assert d < 0
    assert fd == pytest.approx(d, rel=1e-4)
    with pytest.raises(DegenerateProductError):
        einv_left_derivative_at_pc(FreeProduct([C2, C2]))


# percolation probability -----------------------------------------------------


@pytest.mark.parametrize("ranks", [(1, 1), (1, 2), (2, 2)])
def test_theta_on_trees(ranks):
    factors = [Integers() if r == 1 else Free(r) for r in ranks]
    d = 2 * sum(ranks)
    for p in (0.4, 0.6, 0.9):
        rep = theta(FreeProduct(factors), p)
        assert rep.regime == "supercritical" and not rep.extended
        assert rep.theta == pytest.approx(tree_theta(d, p), abs=1e-8)


def test_n_factor_theta_on_tree():
    rep = theta(FreeProduct([Z, Z, Z]), 0.5)
    assert rep.extended
    assert rep.theta == pytest.approx(tree_theta(6, 0.5), abs=1e-8)


def test_n_factor_theta_is_order_invariant():
    # the three-type system is symmetric under reordering
    a = theta(FreeProduct([C2, C3, C4]), 0.5).theta
    b = theta(FreeProduct([C4, C2, C3]), 0.5).theta
    assert a == pytest.approx(b, abs=1e-9)
    assert 0 < a < 1


def test_theta_examples_and_shape():
    assert theta(PSL2Z, 0.6).theta == pytest.approx(0.754773, abs=1e-6)
    assert theta(PSL2Z, 0.8).theta == pytest.approx(0.995144, abs=1e-6)
    assert theta(PSL2Z, 0.3).theta == 0 and theta(PSL2Z, 0.3).regime == "subcritical"
    assert theta(PSL2Z, 1.0).theta == pytest.approx(1.0)
    pc = pc_numeric(PSL2Z, tol=1e-12)
    assert theta(PSL2Z, pc).regime == "critical"
    ps = [pc + 0.01 * k for k in range(1, 48)]
    ths = [theta(PSL2Z, p).theta for p in ps]
    assert all(b > a for a, b in zip(ths, ths[1:]))
    # continuity at p_c with linear onset
    small = theta(PSL2Z, pc + 1e-4).theta
    assert 0 < small < 1e-2


def test_theta_fixed_point_consistency():
    p = 0.45
    product = FreeProduct([C3, C5])
    rep = theta(product, p)
    assert abs(fixed_point_gap(product, p, rep.fixed_point_B)) < 1e-9
    assert rep.theta == pytest.approx(rep.fixed_point_A + rep.fixed_point_B - rep.fixed_point_A * rep.fixed_point_B)
    assert rep.theta == pytest.approx(0.66075, abs=1e-4)


@pytest.mark.parametrize("p, crossings", [(0.3, 0), (0.45, 1), (0.7, 1)])
def test_fixed_point_gap_shape(p, crossings):
    product = FreeProduct([C3, C5])
    h = [fixed_point_gap(product, p, k / 400) for k in range(1, 401)]
    if crossings == 0:
        assert all(v <= 0 for v in h)
    else:
        signs = [v > 0 for v in h]
        assert signs[0] and not signs[-1]
        assert sum(a != b for a, b in zip(signs, signs[1:])) == 1


def test_branching_mean_changes_sign_at_pc():
    rnd = random.Random(7)
    pool = [Cyclic(m) for m in range(2, 11)] + [Z]
    for _ in range(10):
        a, b = rnd.choice(pool), rnd.choice(pool)
        product = FreeProduct([a, b])
        pc = pc_numeric(product)
        if pc >= 1:
            continue
        below = branching_mean(product, pc - 1e-6) - 1
        above = branching_mean(product, min(pc + 1e-6, 1.0)) - 1
        assert below < 0 < above


def test_p_exp():
    assert p_exp(FreeProduct([C2, Free(2)])) == 1
    assert p_exp(FreeProduct([C2, Z]), [None, 0.7]) == 0.7
    with pytest.raises(ValueError):
        p_exp(FreeProduct([C2, Z]), [0.5])
