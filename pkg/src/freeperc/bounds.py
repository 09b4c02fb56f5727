"""
General bounds on p_c and convergence of p_c under quotient approximation.

* ``p_c >= 1 / (2|S| - 1)`` for a group generated by ``|S|`` elements, with
  equality for free groups.
* ``p_c <= 1 / (h + 1)`` with ``h`` the Cheeger constant of the Cayley graph;
  for ``C_m * C_n`` the Cheeger constant is at most
  ``2 - max(2m / (n(m - 1)), 2n / (m(n - 1)))``.
* Replacing infinite factors by finite quotients that are injective on large
  balls moves ``p_c`` up by an amount that decays exponentially in the ball
  radius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ParameterRangeError
from .factors import Cyclic, Integers, chi
from .solver import FreeProduct, pc_numeric

__all__ = [
    "BoundsReport",
    "ApproximationRow",
    "ApproximationResult",
    "lower_bound_est1",
    "cheeger_upper_bound_on_h",
    "cheeger_strictness_check",
    "bounds_report",
    "cyclic_family",
    "approximation_experiment",
]


@dataclass(frozen=True)
class BoundsReport:
    lower_est1: float
    cheeger_upper_bound_on_h: float | None
    upper_est2_from_bound: float | None
    pc: float
    strict: tuple[bool, bool | None]
    check_point: float | None = None
    check_value: float | None = None


@dataclass(frozen=True)
class ApproximationRow:
    j: int
    pc_j: float
    delta_j: float


@dataclass(frozen=True)
class ApproximationResult:
    rows: list[ApproximationRow]
    pc_limit: float
    slope: float | None
    intercept: float | None
    r_squared: float | None
    nonpositive: list[int]


def lower_bound_est1(product: FreeProduct) -> Fraction:
    """``1 / (2|S| - 1)`` with ``|S|`` summed over the factors' generators."""
    s = product.generator_count
    return 1 / (2 * s - 1)


def cheeger_upper_bound_on_h(m: int, n: int) -> Fraction:
    """Upper bound on the Cheeger constant of the Cayley graph of ``C_m * C_n``."""
    return 2 - max(Fraction(2 * m, n * (m - 1)), Fraction(2 * n, m * (n - 1)))


def _check_point(m: int, n: int) -> Fraction:
    # the point where (chi_m - 1)(chi_n - 1) > 1 is verified; n <= m
    n, m = min(m, n), max(m, n)
    if n == 2 and m == 3:
        return 1 / (3 - Fraction(2 * m, n * (m - 1)))
    return 1 / (3 - Fraction(2, n))


def cheeger_strictness_check(m: int, n: int, tol: float = 1e-6) -> BoundsReport:
    """Check ``1/3 < p_c(C_m * C_n) < 1 / (h + 1)`` strictly.

    ``check_value`` is ``(chi_m - 1)(chi_n - 1)`` at ``check_point``; a value
    above 1 proves ``p_c < check_point <= 1 / (h + 1)``.
    """
    if m < 2 or n < 2 or (m - 1) * (n - 1) <= 1:
        raise ParameterRangeError(f"need (m-1)(n-1) > 1, got m={m}, n={n}")
    product = FreeProduct([Cyclic(m), Cyclic(n)])
    pc = float(pc_numeric(product, tol=1e-12))
    lower = lower_bound_est1(product)
    h = cheeger_upper_bound_on_h(m, n)
    upper = 1 / (h + 1)
    point = _check_point(m, n)
    value = (chi(Cyclic(m), point) - 1) * (chi(Cyclic(n), point) - 1)
    return BoundsReport(
        lower_est1=float(lower),
        cheeger_upper_bound_on_h=float(h),
        upper_est2_from_bound=float(upper),
        pc=pc,
        strict=(float(lower) + tol < pc, pc + tol < float(upper)),
        check_point=float(point),
        check_value=float(value),
    )


def bounds_report(product: FreeProduct, tol: float = 1e-6) -> BoundsReport:
    """Bounds for any product; the Cheeger part only for two cyclic factors."""
    fs = product.flattened().factors
    if len(fs) == 2 and all(isinstance(f, Cyclic) for f in fs):
        return cheeger_strictness_check(fs[0].m, fs[1].m, tol)
    pc = float(pc_numeric(product, tol=1e-12))
    lower = float(lower_bound_est1(product))
    return BoundsReport(lower, None, None, pc, (lower + tol < pc, None))


def cyclic_family(target: FreeProduct, radius: bool = False) -> Callable[[int], FreeProduct]:
    """Quotient family replacing each ``Z`` factor by ``C_j`` (or ``C_{2j+1}`` with ``radius``)."""
    def family(j: int) -> FreeProduct:
        order = 2 * j + 1 if radius else j
        return FreeProduct([Cyclic(order) if isinstance(f, Integers) else f for f in target.factors])
    return family


def approximation_experiment(
    target: FreeProduct,
    family: Callable[[int], FreeProduct],
    j_list: Iterable[int],
    tol: Fraction = Fraction(1, 10**60),
) -> ApproximationResult:
    """Critical probabilities of the approximants and the decay of their excess.

    ``p_c`` values come from exact rational bisection to ``tol`` so that
    excesses far below double precision are still resolved. The decay rate is
    a least-squares fit of ``log delta_j`` against ``j`` over rows with
    ``delta_j > 10 tol``.
    """
    tol = Fraction(tol)
    limit = pc_numeric(target, tol=tol, exact=True)
    rows, nonpositive = [], []
    for j in j_list:
        pc_j = pc_numeric(family(j), tol=tol, exact=True)
        delta = pc_j - limit
        rows.append(ApproximationRow(j, float(pc_j), float(delta)))
        if delta <= 10 * tol:
            nonpositive.append(j)
    fit = [(r.j, math.log(r.delta_j)) for r in rows if r.j not in nonpositive and r.delta_j > 0]
    slope = intercept = r2 = None
    if len(fit) >= 2:
        x = np.array([a for a, _ in fit], dtype=float)
        y = np.array([b for _, b in fit], dtype=float)
        slope, intercept = np.polyfit(x, y, 1)
        resid = y - (slope * x + intercept)
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        r2 = 1 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
        slope, intercept = float(slope), float(intercept)
    return ApproximationResult(rows, float(limit), slope, intercept, r2, nonpositive)
