"""
Percolation on Cayley graphs of free products.

The free product's Cayley graph is tree-graded by copies of the factor
Cayley graphs, so everything reduces to single-factor quantities:

* the critical probability is the unique root in ``(0, p_max]`` of
  ``D(p) = sum_j prod_{i != j} chi_i(p) - (n - 1) prod_i chi_i(p)``;
* below it the mean cluster size is ``prod_i chi_i / D``;
* above it the percolation probability comes from the positive fixed point
  of the composed walk-through functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from numbers import Rational
from typing import Sequence

from . import factors as fm
from .errors import DegenerateProductError, FixedPointNotFoundError, NoConvergenceError
from .factors import GroupFactor
from .poly import RationalFunction, RationalPolynomial

__all__ = [
    "FreeProduct",
    "PercolationReport",
    "criticality",
    "pc_numeric",
    "pc_polynomial",
    "expected_cluster_size",
    "branching_mean",
    "fixed_point_gap",
    "theta",
    "p_exp",
    "einv_left_derivative_at_pc",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class FreeProduct:
    """Free product ``G_1 * ... * G_n`` of at least two nontrivial factors.

    A factor may itself be a :class:`FreeProduct`; it then enters the
    critical-probability and mean-size computations through its own mean
    cluster size, which is how the two-factor formulas compose.
    """

    factors: tuple

    def __init__(self, factors: Sequence):
        factors = tuple(factors)
        if len(factors) < 2:
            raise ValueError("a free product needs at least two factors")
        for f in factors:
            if not isinstance(f, (GroupFactor, FreeProduct)):
                raise TypeError(f"not a group factor: {f!r}")
        object.__setattr__(self, "factors", factors)

    @property
    def label(self) -> str:
        return "*".join(f"({f.label})" if isinstance(f, FreeProduct) else f.label for f in self.factors)

    def __str__(self):
        return self.label

    def flattened(self) -> "FreeProduct":
        out = []
        for f in self.factors:
            out.extend(f.flattened().factors if isinstance(f, FreeProduct) else [f])
        return FreeProduct(out)

    # a product used as a factor of a larger product
    is_finite = False
    order = None

    @property
    def degree(self) -> int:
        return sum(f.degree for f in self.factors)

    @property
    def generator_count(self) -> Fraction:
        return sum((f.generator_count for f in self.factors), Fraction(0))

    @property
    def divergence_point(self):
        return pc_numeric(self, exact=True, tol=Fraction(1, 10**30))


@dataclass(frozen=True)
class PercolationReport:
    p: float
    theta: float
    fixed_point_B: float
    fixed_point_A: float
    expected_cluster_size: float
    regime: str
    pc: float
    extended: bool = False


def _chi_rf(factor) -> RationalFunction:
    if isinstance(factor, FreeProduct):
        return _product_chi_rf(factor)
    return fm.chi_closed_form(factor)


@lru_cache(maxsize=None)
def _product_chi_rf(product: FreeProduct) -> RationalFunction:
    chis = [_chi_rf(f) for f in product.factors]
    prod = reduce(lambda a, b: a * b, chis)
    return prod / _d_rf(product)


@lru_cache(maxsize=None)
def _d_rf(product: FreeProduct) -> RationalFunction:
    chis = [_chi_rf(f) for f in product.factors]
    n = len(chis)
    total = RationalFunction(0)
    for j in range(n):
        total = total + reduce(lambda a, b: a * b, [c for i, c in enumerate(chis) if i != j], RationalFunction(1))
    return total - (n - 1) * reduce(lambda a, b: a * b, chis)


def _chi(factor, p):
    if isinstance(factor, FreeProduct):
        return expected_cluster_size(factor, p)
    return fm.chi(factor, p)


def _p_max(product: FreeProduct):
    return min(Fraction(f.divergence_point) for f in product.factors)


def criticality(product: FreeProduct, p):
    """``sum_j 1/chi_j(p) - (n - 1)``: positive below p_c, zero at p_c, negative above.

    This is ``D(p) / prod_i chi_i(p)``; it stays finite where a factor's mean
    cluster size diverges.
    """
    chis = [_chi(f, p) for f in product.factors]
    zero = Fraction(0) if isinstance(p, Rational) else 0.0
    return sum((0 if math.isinf(c) else 1 / c for c in chis), zero) - (len(chis) - 1)


def pc_numeric(product: FreeProduct, tol=DEFAULT_TOL, exact: bool = False):
    """Critical probability by bisection of :func:`criticality` on ``[0, p_max]``.

    ``criticality`` equals 1 at ``p = 0`` and decreases in ``p``. When it is
    still nonnegative at ``p_max`` (the product ``C2*C2``) the critical
    probability is ``p_max = 1``. With ``exact=True`` the bisection runs on
    rationals and a :class:`~fractions.Fraction` is returned.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    return _pc_cached(product, Fraction(tol) if exact else float(tol), exact)


@lru_cache(maxsize=4096)
def _pc_cached(product, tol, exact):
    p_max = _p_max(product)
    if criticality(product, p_max) >= 0:
        return p_max if exact else float(p_max)
    lo, hi = (Fraction(0), p_max) if exact else (0.0, float(p_max))
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if criticality(product, mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def pc_polynomial(product: FreeProduct) -> RationalPolynomial:
    """Integer polynomial whose unique root in (0, 1) is the critical probability.

    It is the numerator of ``D(p)`` with all ``chi_i`` written as reduced
    rational functions, scaled to integer coefficients with content 1 and a
    positive leading coefficient.
    """
    return _d_rf(product).numerator.primitive()


def expected_cluster_size(product: FreeProduct, p):
    """Mean size of the origin's cluster; ``math.inf`` for ``p >= p_c``."""
    fm._check_probability(p)
    chis = [_chi(f, p) for f in product.factors]
    if any(math.isinf(c) for c in chis):
        return math.inf
    n = len(chis)
    prod = reduce(lambda a, b: a * b, chis)
    d = sum(prod / c for c in chis) - (n - 1) * prod
    if d <= 0:
        return math.inf
    if not isinstance(p, Rational) and p >= pc_numeric(product, tol=1e-13):
        return math.inf
    return prod / d


def branching_mean(product: FreeProduct, p):
    """Mean offspring ``(chi_1 - 1)(chi_2 - 1)`` of the two-type branching process."""
    if len(product.factors) != 2:
        raise ValueError("branching_mean is defined for two factors")
    a, b = (_chi(f, p) for f in product.factors)
    return (a - 1) * (b - 1)


def _walk(factor, p, t):
    return fm.walk_through(factor, p, t)


def fixed_point_gap(product: FreeProduct, p: float, t: float) -> float:
    """``h(t) = g_2(p, g_1(p, t)) - t``; its positive root is the fixed point ``B``."""
    f1, f2 = _two_factors(product)
    return _walk(f2, p, _walk(f1, p, t)) - t


def _two_factors(product):
    flat = product.flattened()
    if len(flat.factors) != 2:
        raise ValueError("this quantity is defined for two-factor products")
    return flat.factors


def theta(product: FreeProduct, p, tol: float = DEFAULT_TOL) -> PercolationReport:
    """Percolation probability ``theta(p)`` and the fixed point behind it.

    Two factors: ``B`` is the positive root of ``g_2(p, g_1(p, t)) = t``,
    ``A = g_1(p, B)`` and ``theta = A + B - AB``. More factors use the
    ``n``-type system ``X_i = g_i(p, 1 - prod_{j != i}(1 - X_j))`` and the
    report is flagged ``extended``.
    """
    fm._check_probability(p)
    p = float(p)
    flat = product.flattened()
    pc = float(pc_numeric(flat, tol=min(tol, 1e-12)))
    ec = expected_cluster_size(flat, p)
    if abs(p - pc) <= tol:
        regime = "critical"
    elif p < pc:
        regime = "subcritical"
    else:
        regime = "supercritical"
    extended = len(flat.factors) > 2
    if regime != "supercritical":
        return PercolationReport(p, 0.0, 0.0, 0.0, ec, regime, pc, extended)
    if extended:
        a, b = _solve_n_type(flat, p, tol)
    else:
        b = _solve_two_type(flat, p, tol)
        a = _walk(flat.factors[0], p, b)
    th = a + b - a * b
    return PercolationReport(p, th, b, a, math.inf, regime, pc, extended)


def _solve_two_type(product, p, tol):
    h = lambda t: fixed_point_gap(product, p, t)
    if h(1.0) >= 0:
        return 1.0
    t_pos = None
    for k in range(1, 61):
        t = 2.0 ** -k
        if h(t) > 0:
            t_pos = t
            break
    if t_pos is None:
        raise FixedPointNotFoundError(f"no t with g2(g1(t)) > t for {product} at p={p}")
    lo, hi = t_pos, 1.0
    # h is concave with h(0) = 0: positive on (0, B), nonpositive on [B, 1]
    for _ in range(200):
        if hi - lo <= tol * 1e-3:
            break
        mid = 0.5 * (lo + hi)
        if h(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _solve_n_type(product, p, tol, max_iter=10**6):
    fs = product.factors
    x = [1.0] * len(fs)
    for _ in range(max_iter):
        new = []
        for i, f in enumerate(fs):
            miss = 1.0
            for j in range(len(fs)):
                if j != i:
                    miss *= 1 - x[j]
            new.append(_walk(f, p, 1 - miss))
        done = max(abs(a - b) for a, b in zip(new, x)) < tol * 1e-3
        x = new
        if done:
            break
    else:
        raise NoConvergenceError(f"n-type fixed point for {product} at p={p} did not converge")
    a = x[0]
    rest = 1.0
    for v in x[1:]:
        rest *= 1 - v
    return a, 1 - rest


def p_exp(product: FreeProduct, factor_p_exp: Sequence | None = None) -> float:
    """Threshold of exponential decay of connectivity: the minimum over factors.

    Finite factors, the integers and free groups default to 1; supply values
    for other infinite factors (``None`` entries use the default).
    """
    flat = product.flattened().factors
    if factor_p_exp is None:
        factor_p_exp = [None] * len(flat)
    if len(factor_p_exp) != len(flat):
        raise ValueError(f"expected {len(flat)} per-factor values, got {len(factor_p_exp)}")
    vals = [1.0 if v is None else float(v) for v in factor_p_exp]
    for v in vals:
        if not 0 <= v <= 1:
            raise ValueError(f"p_exp values must lie in [0, 1], got {v}")
    return min(vals)


def einv_left_derivative_at_pc(product: FreeProduct, tol: float = 1e-14) -> float:
    """Left derivative of ``1 / E_p|C|`` at ``p_c`` for a two-factor product.

    ``[chi_1'(1 - chi_2) + chi_2'(1 - chi_1)] / (chi_1 chi_2)`` at ``p_c``;
    strictly negative, so the mean cluster size blows up like ``(p_c - p)^-1``.
    """
    if len(product.factors) != 2:
        raise ValueError("the derivative formula is stated for two factors")
    pc = pc_numeric(product, tol=tol)
    if pc >= float(_p_max(product)):
        raise DegenerateProductError(f"p_c of {product} sits at the domain boundary")
    f1, f2 = product.factors
    c1, c2 = float(_chi_rf(f1)(pc)), float(_chi_rf(f2)(pc))
    d1 = float(_chi_rf(f1).derivative()(pc))
    d2 = float(_chi_rf(f2).derivative()(pc))
    return (d1 * (1 - c2) + d2 * (1 - c1)) / (c1 * c2)
