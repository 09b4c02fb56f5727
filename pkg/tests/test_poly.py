from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from freeperc.errors import PoleError
from freeperc.poly import (
    P,
    RationalFunction,
    RationalPolynomial,
    count_roots,
    isolate_roots_01,
    poly_gcd,
    square_free_part,
    sturm_sequence,
)

ints = st.integers(min_value=-9, max_value=9)
polys = st.lists(ints, min_size=1, max_size=6).map(RationalPolynomial)
nonzero_polys = polys.filter(lambda f: not f.is_zero())
rationals = st.fractions(min_value=-3, max_value=3, max_denominator=50)


def _sympy(f: RationalPolynomial):
    x = sympy.Symbol("x")
    return sympy.Poly(list(reversed([sympy.Rational(c.numerator, c.denominator) for c in f.coefficients])), x)


@given(polys, polys, rationals)
def test_ring_operations_commute_with_evaluation(a, b, x):
    assert (a + b)(x) == a(x) + b(x)
    assert (a - b)(x) == a(x) - b(x)
    assert (a * b)(x) == a(x) * b(x)
    assert (a ** 3)(x) == a(x) ** 3
    assert a.compose(b)(x) == a(b(x))


@given(polys, nonzero_polys)
def test_division_with_remainder(a, b):
    q, r = divmod(a, b)
    assert q * b + r == a
    assert r.is_zero() or r.degree < b.degree


@given(polys, polys)
def test_product_rule(a, b):
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


@given(nonzero_polys, nonzero_polys, nonzero_polys)
def test_gcd_is_monic_common_factor(a, b, c):
    g = poly_gcd(a * c, b * c)
    assert g.leading_coefficient == 1
    assert ((a * c) % g).is_zero() and ((b * c) % g).is_zero()
    assert (g % c.monic()).is_zero()


def test_primitive_and_rendering():
    f = RationalPolynomial([Fraction(-1, 2), 0, 2, 1, -3, 1])
    prim = f.primitive()
    assert prim.integer_coefficients() == [-1, 0, 4, 2, -6, 2]
    assert str(prim) == "2*p^5 - 6*p^4 + 2*p^3 + 4*p^2 - 1"
    assert (-prim).primitive() == prim


def test_float_and_exact_evaluation_agree():
    f = P(-1, 0, 4, 2, -6, 2)
    # 2/32 - 6/16 + 2/8 + 4/4 - 1
    assert f(Fraction(1, 2)) == Fraction(-1, 16)
    assert abs(f(0.37) - float(f(Fraction(37, 100)))) < 1e-15


def test_rational_function_reduces_and_compares():
    a = RationalFunction(P(1, 0, -1), P(1, -1))  # (1 - p^2)/(1 - p)
    assert a.is_polynomial()
    assert a == RationalFunction(P(1, 1))
    b = RationalFunction(P(1), P(0, 2))
    assert (a * b)(Fraction(1, 3)) == Fraction(4, 3) * Fraction(3, 2)
    assert (a / b - a * P(0, 2)) == RationalFunction(0)


def test_rational_function_pole():
    f = RationalFunction(P(1, 1), P(1, -1))
    with pytest.raises(PoleError):
        f(Fraction(1))
    with pytest.raises(ZeroDivisionError):
        f(1.0)


@settings(max_examples=60)
@given(nonzero_polys)
def test_sturm_count_matches_sympy(f):
    # sympy lists repeated roots with multiplicity; Sturm counts distinct ones
    distinct = len({r for r in _sympy(f).real_roots() if 0 < r <= 1}) if f.degree > 0 else 0
    assert count_roots(f, 0, 1) == distinct


@settings(max_examples=60)
@given(nonzero_polys, nonzero_polys)
def test_isolated_roots_bracket_sympy_roots(a, b):
    f = a * b
    if f.degree <= 0:
        assert isolate_roots_01(f) == []
        return
    truth = sorted({r for r in _sympy(f).real_roots() if 0 < r < 1})
    found = isolate_roots_01(f, tol=1e-10)
    assert len(found) == len(truth)
    for r, z in zip(found, truth):
        assert r.bracket_low <= z <= r.bracket_high
        assert r.width <= Fraction(1, 10**10)
        assert abs(r.refined_value - float(z)) <= 1e-10


def test_root_examples():
    [r] = isolate_roots_01(P(-1, 0, 4))
    assert r.bracket_low == r.bracket_high == Fraction(1, 2)
    assert isolate_roots_01(P(1, 0, 1)) == []
    [r] = isolate_roots_01(P(-1, 0, 4, 2, -6, 2), tol=1e-12)
    assert abs(r.refined_value - 0.5199490766) < 1e-9
    # repeated root plus a simple one
    f = P(-1, 2) ** 2 * P(-1, 3)
    assert [x.refined_value for x in isolate_roots_01(f)] == pytest.approx([1 / 3, 1 / 2], abs=1e-12)


def test_square_free_part_keeps_roots():
    f = P(-1, 2) ** 3 * P(1, 1) ** 2
    g = square_free_part(f)
    assert g.degree == 2
    assert g(Fraction(1, 2)) == 0 and g(Fraction(-1)) == 0
    assert len(sturm_sequence(g)) == 3
