from fractions import Fraction

import pytest

from freeperc.bounds import (
    approximation_experiment,
    bounds_report,
    cheeger_strictness_check,
    cheeger_upper_bound_on_h,
    cyclic_family,
    lower_bound_est1,
)
from freeperc.errors import ParameterRangeError
from freeperc.factors import Cyclic, Free, Integers, chi
from freeperc.solver import FreeProduct, pc_numeric

Z = Integers()


def test_lower_bound():
    assert lower_bound_est1(FreeProduct([Cyclic(4), Cyclic(7)])) == Fraction(1, 3)
    assert lower_bound_est1(FreeProduct([Z, Z])) == Fraction(1, 3)
    assert lower_bound_est1(FreeProduct([Free(2), Free(3)])) == Fraction(1, 9)
    # equality exactly for free groups
    assert pc_numeric(FreeProduct([Free(2), Free(3)]), exact=True, tol=Fraction(1, 10**20)) - Fraction(1, 9) < Fraction(1, 10**20)


@pytest.mark.parametrize("m, n", [(2, 3), (3, 2), (2, 4), (3, 3), (4, 10), (7, 5)])
def test_strict_bounds(m, n):
    rep = cheeger_strictness_check(m, n)
    assert rep.strict == (True, True)
    assert rep.lower_est1 < rep.pc < rep.upper_est2_from_bound
    assert rep.check_value > 1
    assert rep.pc < rep.check_point <= rep.upper_est2_from_bound + 1e-15


def test_check_points():
    rep = cheeger_strictness_check(2, 3)
    assert rep.check_point == pytest.approx(2 / 3)
    assert rep.check_value == pytest.approx(1.4486, abs=1e-4)
    rep = cheeger_strictness_check(2, 4)
    assert rep.check_point == 0.5
    assert float((chi(Cyclic(2), Fraction(1, 2)) - 1) * (chi(Cyclic(4), Fraction(1, 2)) - 1)) == pytest.approx(1.171875)
    assert cheeger_upper_bound_on_h(2, 3) == Fraction(1, 2)


def test_degenerate_pair_rejected():
    with pytest.raises(ParameterRangeError):
        cheeger_strictness_check(2, 2)


def test_bounds_report_general_product():
    rep = bounds_report(FreeProduct([Z, Cyclic(3)]))
    assert rep.cheeger_upper_bound_on_h is None
    assert rep.strict[0] is True and rep.lower_est1 == pytest.approx(1 / 3)


def test_approximation_convergence():
    target = FreeProduct([Z, Cyclic(2)])
    res = approximation_experiment(target, cyclic_family(target), [5, 10, 20, 40, 80])
    deltas = [r.delta_j for r in res.rows]
    assert all(d > 0 for d in deltas)
    assert all(b <= a for a, b in zip(deltas, deltas[1:]))
    assert deltas[-1] <= 1e-4
    assert res.slope < 0 and res.r_squared > 0.9
    assert res.nonpositive == []
    assert round(res.rows[-1].pc_j, 4) == round(res.pc_limit, 4) == 0.4268


def test_ball_family_and_free_limit():
    target = FreeProduct([Z, Z])
    res = approximation_experiment(target, cyclic_family(target, radius=True), [1, 2, 4, 8, 16])
    assert res.pc_limit == pytest.approx(1 / 3, abs=1e-15)
    assert all(r.delta_j >= 0 for r in res.rows)
    assert res.rows[-1].delta_j < 1e-6


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_approximant_chi_is_dominated(p):
    assert all(chi(Cyclic(2 * j + 1), p) <= chi(Z, p) for j in range(1, 30))


def test_tolerance_floor_reports_nonpositive():
    target = FreeProduct([Z, Cyclic(2)])
    res = approximation_experiment(target, cyclic_family(target), [5, 200], tol=Fraction(1, 10**12))
    assert res.nonpositive == [200]
    assert res.slope is None
