"""
Exact univariate polynomials and rational functions over the rationals.

Coefficients are stored lowest degree first as :class:`fractions.Fraction`.
Real roots on the open unit interval are isolated with Sturm sequences and
refined by bisection, all in exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Sequence

from .errors import PoleError

__all__ = [
    "RationalPolynomial",
    "RationalFunction",
    "IsolatedRoot",
    "poly_add",
    "poly_mul",
    "poly_derivative",
    "rf_eval",
    "square_free_part",
    "sturm_sequence",
    "count_roots",
    "isolate_roots_01",
    "P",
]


def _is_exact(x) -> bool:
    return isinstance(x, Rational)


class RationalPolynomial:
    """Polynomial in one variable ``p`` with exact rational coefficients.

    Parameters
    ----------
    coefficients : iterable of rationals
        ``coefficients[k]`` is the coefficient of ``p**k``. Trailing zeros are
        stripped, so the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coefficients", "_float_coeffs")

    def __init__(self, coefficients: Iterable = ()):
        coeffs = [Fraction(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients: tuple[Fraction, ...] = tuple(coeffs)
        self._float_coeffs = None

    # construction helpers
    @classmethod
    def constant(cls, c) -> "RationalPolynomial":
        return cls([c])

    @classmethod
    def monomial(cls, degree: int, c=1) -> "RationalPolynomial":
        return cls([0] * degree + [c])

    @classmethod
    def _coerce(cls, other) -> "RationalPolynomial":
        if isinstance(other, RationalPolynomial):
            return other
        if _is_exact(other):
            return cls([other])
        return NotImplemented

    # basic properties
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def leading_coefficient(self) -> Fraction:
        return self.coefficients[-1] if self.coefficients else Fraction(0)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"RationalPolynomial({self})"

    def __str__(self):
        if not self.coefficients:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coefficients[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mono = "p" if k == 1 else f"p^{k}"
                body = mono if a == 1 else f"{a}*{mono}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    # arithmetic
    def __neg__(self):
        return RationalPolynomial(-c for c in self.coefficients)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return RationalPolynomial(out)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = RationalPolynomial([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coefficients)
        dd = other.degree
        lead = other.leading_coefficient
        if len(rem) - 1 < dd:
            return RationalPolynomial(), RationalPolynomial(rem)
        quot = [Fraction(0)] * (len(rem) - dd)
        for k in range(len(rem) - 1 - dd, -1, -1):
            c = rem[k + dd] / lead
            quot[k] = c
            if c:
                for j, b in enumerate(other.coefficients):
                    rem[k + j] -= c * b
        return RationalPolynomial(quot), RationalPolynomial(rem[:dd])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "RationalPolynomial":
        """Quotient of a division known to be exact."""
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial(k * c for k, c in enumerate(self.coefficients) if k)

    def compose(self, other: "RationalPolynomial") -> "RationalPolynomial":
        """``self(other(p))`` by Horner's scheme."""
        result = RationalPolynomial()
        for c in reversed(self.coefficients):
            result = result * other + c
        return result

    # evaluation
    def __call__(self, x):
        if _is_exact(x):
            acc = Fraction(0)
            x = Fraction(x)
            for c in reversed(self.coefficients):
                acc = acc * x + c
            return acc
        if self._float_coeffs is None:
            self._float_coeffs = tuple(float(c) for c in self.coefficients)
        acc = 0.0
        for c in reversed(self._float_coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x) -> int:
        v = self(Fraction(x))
        return (v > 0) - (v < 0)

    # normalisations
    def monic(self) -> "RationalPolynomial":
        if self.is_zero():
            return self
        lead = self.leading_coefficient
        return RationalPolynomial(c / lead for c in self.coefficients)

    def primitive(self) -> "RationalPolynomial":
        """Integer coefficients with content 1 and positive leading coefficient."""
        if self.is_zero():
            return self
        den = reduce(lcm, (c.denominator for c in self.coefficients), 1)
        ints = [int(c * den) for c in self.coefficients]
        content = reduce(gcd, ints, 0)
        if ints[-1] < 0:
            content = -content
        return RationalPolynomial(Fraction(c, content) for c in ints)

    def integer_coefficients(self) -> list[int]:
        """Coefficients of :meth:`primitive` as Python ints, lowest degree first."""
        return [int(c) for c in self.primitive().coefficients]


def P(*coefficients) -> RationalPolynomial:
    """Shorthand constructor: ``P(1, 0, -1)`` is ``1 - p**2``."""
    return RationalPolynomial(coefficients)


def poly_add(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    return a + b


def poly_mul(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    return a * b


def poly_derivative(a: RationalPolynomial) -> RationalPolynomial:
    return a.derivative()


def poly_gcd(a: RationalPolynomial, b: RationalPolynomial) -> RationalPolynomial:
    """Monic greatest common divisor (zero if both inputs are zero)."""
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


class RationalFunction:
    """Quotient of two rational polynomials kept in reduced form.

    The denominator is made monic after cancelling the gcd, so equal functions
    have equal representations.
    """

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator, denominator=None):
        num = RationalPolynomial._coerce(numerator)
        den = RationalPolynomial([1]) if denominator is None else RationalPolynomial._coerce(denominator)
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("numerator and denominator must be rational polynomials")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = poly_gcd(num, den)
        if g.degree > 0:
            num = num.exact_div(g)
            den = den.exact_div(g)
        lead = den.leading_coefficient
        self.numerator = RationalPolynomial(c / lead for c in num.coefficients)
        self.denominator = RationalPolynomial(c / lead for c in den.coefficients)

    @classmethod
    def _coerce(cls, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, RationalPolynomial) or _is_exact(other):
            return cls(other)
        return NotImplemented

    def is_polynomial(self) -> bool:
        return self.denominator.degree == 0

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.numerator == other.numerator and self.denominator == other.denominator

    def __hash__(self):
        return hash((self.numerator, self.denominator))

    def __repr__(self):
        return f"RationalFunction(({self.numerator}) / ({self.denominator}))"

    def __neg__(self):
        return RationalFunction(-self.numerator, self.denominator)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(
            self.numerator * other.numerator, self.denominator * other.denominator
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.numerator.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalFunction(
            self.numerator * other.denominator, self.denominator * other.numerator
        )

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def derivative(self) -> "RationalFunction":
        n, d = self.numerator, self.denominator
        return RationalFunction(n.derivative() * d - n * d.derivative(), d * d)

    def __call__(self, x):
        den = self.denominator(x)
        if den == 0:
            raise PoleError(f"denominator {self.denominator} vanishes at p = {x}")
        return self.numerator(x) / den


def rf_eval(f, p):
    """Evaluate a polynomial or rational function at ``p``.

    Exact rational input gives an exact :class:`~fractions.Fraction`; float
    input gives a float. Raises :class:`PoleError` at a zero of the
    denominator.
    """
    return f(p)


@dataclass(frozen=True)
class IsolatedRoot:
    """A real root certified to be the only one in ``[bracket_low, bracket_high]``."""

    bracket_low: Fraction
    bracket_high: Fraction
    refined_value: float
    tolerance: float

    @property
    def width(self) -> Fraction:
        return self.bracket_high - self.bracket_low


def square_free_part(f: RationalPolynomial) -> RationalPolynomial:
    """``f / gcd(f, f')``: same roots as ``f``, all simple."""
    g = poly_gcd(f, f.derivative())
    if g.degree <= 0:
        return f
    return f.exact_div(g)


def sturm_sequence(f: RationalPolynomial) -> list[RationalPolynomial]:
    seq = [f, f.derivative()]
    while not seq[-1].is_zero():
        r = -(seq[-2] % seq[-1])
        if r.is_zero():
            break
        seq.append(r)
    return [s for s in seq if not s.is_zero()]


def _sign_variations(seq: Sequence[RationalPolynomial], x: Fraction) -> int:
    signs = []
    for s in seq:
        v = s(x)
        if v:
            signs.append(v > 0)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(f: RationalPolynomial, low, high, seq=None) -> int:
    """Number of distinct real roots of ``f`` in the half-open interval ``(low, high]``."""
    if f.is_zero():
        raise ValueError("the zero polynomial has infinitely many roots")
    if seq is None:
        seq = sturm_sequence(square_free_part(f))
    return _sign_variations(seq, Fraction(low)) - _sign_variations(seq, Fraction(high))


def _open_count(g, lo, hi, seq) -> int:
    return count_roots(g, lo, hi, seq) - (1 if g(hi) == 0 else 0)


def isolate_roots_01(f: RationalPolynomial, tol: float = 1e-12) -> list[IsolatedRoot]:
    """Isolate and refine every distinct real root of ``f`` in the open interval (0, 1).

    The number of roots is certified by Sturm's theorem on the square-free part
    of ``f``; each bracket is then narrowed by exact bisection until its width
    is at most ``tol``.
    """
    if f.is_zero():
        raise ValueError("cannot isolate roots of the zero polynomial")
    g = square_free_part(f)
    seq = sturm_sequence(g)
    tol_q = Fraction(tol)

    roots: list[IsolatedRoot] = []
    # open intervals with their certified root counts
    stack = [(Fraction(0), Fraction(1), _open_count(g, Fraction(0), Fraction(1), seq))]
    while stack:
        lo, hi, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            roots.append(_refine(g, seq, lo, hi, tol_q, tol))
            continue
        mid = (lo + hi) / 2
        mid_root = g(mid) == 0
        if mid_root:
            roots.append(IsolatedRoot(mid, mid, float(mid), tol))
        left = _open_count(g, lo, mid, seq)
        stack.append((mid, hi, n - left - mid_root))
        stack.append((lo, mid, left))
    roots.sort(key=lambda r: r.bracket_low)
    return roots


def _refine(g, seq, lo: Fraction, hi: Fraction, tol_q: Fraction, tol: float) -> IsolatedRoot:
    # exactly one root of the square-free g lies in the open interval (lo, hi)
    if g(lo) == 0:
        step = (hi - lo) / 2
        while g(lo + step) == 0 or _open_count(g, lo + step, hi, seq) != 1:
            step /= 2
        lo = lo + step
    if g(hi) == 0:
        step = (hi - lo) / 2
        while g(hi - step) == 0 or _open_count(g, lo, hi - step, seq) != 1:
            step /= 2
        hi = hi - step
    s_lo = g.sign_at(lo)
    while hi - lo > tol_q:
        mid = (lo + hi) / 2
        s = g.sign_at(mid)
        if s == 0:
            return IsolatedRoot(mid, mid, float(mid), tol)
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return IsolatedRoot(lo, hi, float((lo + hi) / 2), tol)
