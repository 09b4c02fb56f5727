"""
Free-product factors and their single-factor percolation primitives.

A factor is one of the groups that get glued together in a free product:
a finite cyclic group, an arbitrary finite group given by its Cayley graph,
the integers, or a free group of rank at least two. For each factor we need

* the cluster-size distribution ``Q(n) = P_p(|C| = n)`` (finite factors),
* the expected cluster size ``chi(p) = E_p|C|`` and its derivative,
* the walk-through function ``g(p, t) = 1 - E_p[(1 - t)^(|C| - 1)]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from numbers import Rational
from pathlib import Path

import numpy as np

from .errors import (
    DisconnectedGraphError,
    EnumerationCapError,
    GraphFormatError,
    NoConvergenceError,
    PoleError,
)
from .poly import RationalFunction, RationalPolynomial

__all__ = [
    "FiniteCayleyGraph",
    "GroupFactor",
    "Cyclic",
    "ExplicitFinite",
    "Integers",
    "Free",
    "ClusterSizeDistribution",
    "cluster_distribution",
    "chi",
    "chi_closed_form",
    "chi_exact_oracle",
    "chi_prime",
    "walk_through",
    "walk_through_free",
    "parse_edge_list",
    "read_edge_list",
    "DEFAULT_ENUMERATION_CAP",
]

DEFAULT_ENUMERATION_CAP = 20
ORACLE_ENUMERATION_CAP = 24

_ONE = RationalPolynomial([1])
_P = RationalPolynomial([0, 1])
_ONE_MINUS_P = RationalPolynomial([1, -1])


# ---------------------------------------------------------------------------
# finite Cayley graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteCayleyGraph:
    """Finite multigraph standing in for the Cayley graph of a finite group.

    Vertex 0 is the identity (the origin). ``edges`` is a multiset of
    unordered vertex pairs; parallel edges are repeated entries. Only
    connectivity and degree-regularity are checked: vertex-transitivity is the
    caller's responsibility.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    origin: int = field(default=0, init=False)

    def __post_init__(self):
        k = self.vertex_count
        if k < 1:
            raise GraphFormatError("a Cayley graph needs at least one vertex")
        norm = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if not (0 <= u < k and 0 <= v < k):
                raise GraphFormatError(f"edge ({u}, {v}) has an endpoint outside 0..{k - 1}")
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            norm.append((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(norm)))
        degrees = [0] * k
        for u, v in self.edges:
            degrees[u] += 1
            degrees[v] += 1
        if len(set(degrees)) > 1:
            raise GraphFormatError(f"graph is not degree-regular: degrees {degrees}")
        if _component_mask(k, self.edges, 1) != (1 << k) - 1:
            raise DisconnectedGraphError("Cayley graph of a group must be connected")

    @property
    def degree(self) -> int:
        """Degree of the origin, parallel edges counted with multiplicity."""
        return sum((u == 0) + (v == 0) for u, v in self.edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @classmethod
    def cycle(cls, m: int) -> "FiniteCayleyGraph":
        """Cayley graph of the cyclic group of order ``m``; for ``m = 2`` a double edge."""
        if m < 2:
            raise ValueError("cyclic order must be at least 2")
        if m == 2:
            return cls(2, ((0, 1), (0, 1)))
        return cls(m, tuple((j, (j + 1) % m) for j in range(m)))

    def to_edge_list(self) -> str:
        counts: dict[tuple[int, int], int] = {}
        for e in self.edges:
            counts[e] = counts.get(e, 0) + 1
        lines = [f"vertices {self.vertex_count} origin 0 degree {self.degree}"]
        lines += [f"{u} {v}" + (f" {c}" if c > 1 else "") for (u, v), c in counts.items()]
        return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> FiniteCayleyGraph:
    """Parse the plain-text edge-list format.

    The first non-comment line reads ``vertices k origin 0 degree d``; every
    further line is ``u v`` or ``u v multiplicity``. ``#`` starts a comment.
    """
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise GraphFormatError("empty edge list")
    head = rows[0]
    if len(head) != 6 or head[0] != "vertices" or head[2] != "origin" or head[4] != "degree":
        raise GraphFormatError("header must read 'vertices k origin 0 degree d'")
    try:
        k, origin, d = int(head[1]), int(head[3]), int(head[5])
    except ValueError as exc:
        raise GraphFormatError(f"non-integer header field: {exc}") from None
    if origin != 0:
        raise GraphFormatError("origin must be vertex 0")
    edges = []
    for row in rows[1:]:
        if len(row) not in (2, 3):
            raise GraphFormatError(f"bad edge line {' '.join(row)!r}")
        try:
            u, v = int(row[0]), int(row[1])
            mult = int(row[2]) if len(row) == 3 else 1
        except ValueError:
            raise GraphFormatError(f"bad edge line {' '.join(row)!r}") from None
        if mult < 1:
            raise GraphFormatError("multiplicity must be positive")
        edges.extend([(u, v)] * mult)
    graph = FiniteCayleyGraph(k, tuple(edges))
    if graph.degree != d:
        raise GraphFormatError(f"declared degree {d} but origin has degree {graph.degree}")
    return graph


def read_edge_list(path) -> FiniteCayleyGraph:
    return parse_edge_list(Path(path).read_text())


def _component_mask(k: int, edges, start_mask: int) -> int:
    """Bitmask of vertices reachable from ``start_mask`` along ``edges``."""
    adj = [0] * k
    for u, v in edges:
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    seen = start_mask
    frontier = start_mask
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= adj[low.bit_length() - 1]
            f ^= low
        frontier = nxt & ~seen
        seen |= frontier
    return seen


# ---------------------------------------------------------------------------
# factor kinds
# ---------------------------------------------------------------------------


class GroupFactor:
    """Common interface of the four factor kinds."""

    label: str

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    @property
    def order(self) -> int | None:
        return None

    @property
    def degree(self) -> int:
        raise NotImplementedError

    @property
    def generator_count(self) -> Fraction:
        """Generators without inverses: half the degree of the Cayley graph."""
        return Fraction(self.degree, 2)

    @property
    def divergence_point(self) -> Fraction:
        """Smallest ``p`` at which the expected cluster size is infinite (1 if none below 1)."""
        return Fraction(1)

    def __str__(self):
        return self.label


@dataclass(frozen=True)
class Cyclic(GroupFactor):
    """Cyclic group of order ``m`` with one generator; ``C2`` has a double edge."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"cyclic order must be an integer >= 2, got {self.m}")

    @property
    def label(self) -> str:
        return f"C{self.m}"

    @property
    def order(self) -> int:
        return self.m

    @property
    def degree(self) -> int:
        return 2

    @property
    def graph(self) -> FiniteCayleyGraph:
        return FiniteCayleyGraph.cycle(self.m)


@dataclass(frozen=True)
class ExplicitFinite(GroupFactor):
    """Finite group given directly by a Cayley multigraph."""

    graph: FiniteCayleyGraph
    name: str | None = None

    @property
    def label(self) -> str:
        return self.name or f"G{self.graph.vertex_count}"

    @property
    def order(self) -> int:
        return self.graph.vertex_count

    @property
    def degree(self) -> int:
        return self.graph.degree


@dataclass(frozen=True)
class Integers(GroupFactor):
    """The infinite cyclic group; Cayley graph is the bi-infinite path."""

    @property
    def label(self) -> str:
        return "Z"

    @property
    def degree(self) -> int:
        return 2


@dataclass(frozen=True)
class Free(GroupFactor):
    """Free group of rank ``n >= 2``; Cayley graph is the ``2n``-regular tree."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"free rank must be an integer >= 2, got {self.n} (use Integers for rank 1)")

    @property
    def label(self) -> str:
        return f"F{self.n}"

    @property
    def degree(self) -> int:
        return 2 * self.n

    @property
    def divergence_point(self) -> Fraction:
        return Fraction(1, 2 * self.n - 1)


def factor_graph(factor: GroupFactor) -> FiniteCayleyGraph:
    if isinstance(factor, Cyclic):
        return factor.graph
    if isinstance(factor, ExplicitFinite):
        return factor.graph
    raise ValueError(f"{factor} is infinite and has no finite Cayley graph")


# ---------------------------------------------------------------------------
# cluster-size distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClusterSizeDistribution:
    """``q[n - 1]`` is the polynomial ``P_p(|C| = n)`` for ``n = 1..|G|``."""

    q: tuple[RationalPolynomial, ...]

    def __getitem__(self, n: int) -> RationalPolynomial:
        if n < 1:
            raise IndexError("cluster sizes start at 1")
        return self.q[n - 1] if n <= len(self.q) else RationalPolynomial()

    def __len__(self):
        return len(self.q)

    def total(self) -> RationalPolynomial:
        return sum(self.q, RationalPolynomial())

    def mean(self) -> RationalPolynomial:
        return sum((n * qn for n, qn in enumerate(self.q, 1)), RationalPolynomial())

    def __call__(self, p) -> list:
        return [qn(p) for qn in self.q]


def _one_minus_p_pow(k: int, _cache={}) -> RationalPolynomial:
    if k not in _cache:
        _cache[k] = _ONE_MINUS_P ** k
    return _cache[k]


def _spanning_counts(k: int, edges: list[tuple[int, int]]) -> np.ndarray:
    """``counts[j]`` = number of ``j``-edge subsets of ``edges`` that connect all ``k`` vertices."""
    m = len(edges)
    if k == 1:
        out = np.zeros(m + 1, dtype=np.int64)
        # every subset is spanning on a single vertex
        for j in range(m + 1):
            out[j] = math.comb(m, j)
        return out
    masks = np.arange(1 << m, dtype=np.int64)
    reach = np.ones(1 << m, dtype=np.int64)
    opened = [((masks >> e) & 1) for e in range(m)]
    for _ in range(k - 1):
        for e, (u, v) in enumerate(edges):
            o = opened[e]
            reach |= ((o & (reach >> u)) & 1) << v
            reach |= ((o & (reach >> v)) & 1) << u
    spanning = masks[reach == (1 << k) - 1]
    sizes = np.bitwise_count(spanning.astype(np.uint64)).astype(np.int64)
    return np.bincount(sizes, minlength=m + 1)


def connectedness_polynomial(k: int, edges: list[tuple[int, int]]) -> RationalPolynomial:
    """All-terminal connectedness probability of a multigraph on ``k`` vertices."""
    m = len(edges)
    counts = _spanning_counts(k, edges)
    out = RationalPolynomial()
    for j, c in enumerate(counts):
        if c:
            out = out + int(c) * RationalPolynomial.monomial(j) * _one_minus_p_pow(m - j)
    return out


@lru_cache(maxsize=None)
def _explicit_distribution(graph: FiniteCayleyGraph, cap: int) -> ClusterSizeDistribution:
    if graph.edge_count > cap:
        raise EnumerationCapError(
            f"graph has {graph.edge_count} edges, enumeration cap is {cap}"
        )
    k = graph.vertex_count
    q = [RationalPolynomial() for _ in range(k)]
    others = list(range(1, k))
    for size in range(1, k + 1):
        for rest in combinations(others, size - 1):
            w = (0,) + rest
            wset = set(w)
            inner = [(u, v) for u, v in graph.edges if u in wset and v in wset]
            boundary = sum(1 for u, v in graph.edges if (u in wset) != (v in wset))
            local = {x: i for i, x in enumerate(w)}
            inner_local = [(local[u], local[v]) for u, v in inner]
            if _component_mask(size, inner_local, 1) != (1 << size) - 1:
                continue
            q[size - 1] = q[size - 1] + connectedness_polynomial(size, inner_local) * _one_minus_p_pow(boundary)
    return ClusterSizeDistribution(tuple(q))


@lru_cache(maxsize=None)
def _cyclic_distribution(m: int) -> ClusterSizeDistribution:
    q = []
    for n in range(1, m):
        q.append(n * _ONE_MINUS_P ** 2 * _P ** (n - 1))
    q.append((m * _ONE_MINUS_P + _P) * _P ** (m - 1))
    return ClusterSizeDistribution(tuple(q))


def cluster_distribution(factor: GroupFactor, cap: int = DEFAULT_ENUMERATION_CAP) -> ClusterSizeDistribution:
    """Exact cluster-size distribution of the origin in a finite factor.

    Cyclic groups use the arc-counting closed form. Explicit Cayley graphs sum,
    over vertex sets ``W`` containing the origin, the connectedness polynomial
    of the induced multigraph times ``(1 - p)`` to the number of boundary edges.
    """
    if isinstance(factor, Cyclic):
        return _cyclic_distribution(factor.m)
    if isinstance(factor, ExplicitFinite):
        return _explicit_distribution(factor.graph, cap)
    raise ValueError(f"cluster_distribution needs a finite factor, got {factor}")


# ---------------------------------------------------------------------------
# expected cluster size
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def chi_closed_form(factor: GroupFactor) -> RationalFunction:
    """``E_p|C|`` inside the factor as an exact rational function of ``p``."""
    if isinstance(factor, Cyclic):
        m = factor.m
        num = (1 + _P) - (m + 1) * _P ** m + (m - 1) * _P ** (m + 1)
        return RationalFunction(num, _ONE_MINUS_P)
    if isinstance(factor, Integers):
        return RationalFunction(1 + _P, _ONE_MINUS_P)
    if isinstance(factor, Free):
        return RationalFunction(1 + _P, 1 - (2 * factor.n - 1) * _P)
    if isinstance(factor, ExplicitFinite):
        return RationalFunction(cluster_distribution(factor).mean())
    raise TypeError(f"unsupported factor {factor!r}")


def _check_probability(p):
    if not 0 <= p <= 1:
        raise ValueError(f"probability must lie in [0, 1], got {p}")


def chi(factor: GroupFactor, p):
    """Expected size of the origin's cluster in the factor's Cayley graph.

    Returns an exact :class:`~fractions.Fraction` for rational ``p``, a float
    otherwise, and ``math.inf`` at or beyond the divergence point of an
    infinite factor.
    """
    _check_probability(p)
    if not factor.is_finite and p >= factor.divergence_point:
        return math.inf
    return chi_closed_form(factor)(p)


def chi_prime(factor: GroupFactor, p):
    """Derivative of :func:`chi` in ``p``; :class:`PoleError` outside the finite domain."""
    _check_probability(p)
    if not factor.is_finite and p >= factor.divergence_point:
        raise PoleError(f"E_p|C| of {factor} is infinite at p = {p}")
    return _chi_derivative(factor)(p)


@lru_cache(maxsize=None)
def _chi_derivative(factor: GroupFactor) -> RationalFunction:
    return chi_closed_form(factor).derivative()


def chi_exact_oracle(graph: FiniteCayleyGraph, p, cap: int = ORACLE_ENUMERATION_CAP) -> Fraction:
    """``E_p|C|`` by brute force over all ``2^|E|`` open/closed edge states."""
    m = graph.edge_count
    if m > cap:
        raise EnumerationCapError(f"graph has {m} edges, oracle cap is {cap}")
    p = Fraction(p)
    k = graph.vertex_count
    size_by_open = [0] * (m + 1)
    for state in range(1 << m):
        parent = list(range(k))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        n_open = 0
        for e, (u, v) in enumerate(graph.edges):
            if state >> e & 1:
                n_open += 1
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
        root = find(0)
        size_by_open[n_open] += sum(1 for x in range(k) if find(x) == root)
    return sum(
        (s * p ** j * (1 - p) ** (m - j) for j, s in enumerate(size_by_open)),
        Fraction(0),
    )


# ---------------------------------------------------------------------------
# walk-through function
# ---------------------------------------------------------------------------


def walk_through(factor: GroupFactor, p, t):
    """``g(p, t) = 1 - sum_n (1 - t)^(n - 1) Q(n)``.

    Exact for rational ``p`` and ``t`` on finite factors and the integers;
    free factors are always evaluated in floating point.
    """
    _check_probability(p)
    _check_probability(t)
    if isinstance(factor, Free):
        return walk_through_free(factor.n, float(p), float(t))
    exact = isinstance(p, Rational) and isinstance(t, Rational)
    if isinstance(factor, Integers):
        return _walk_through_integers(p, t, exact)
    dist = cluster_distribution(factor)
    if exact:
        s = 1 - Fraction(t)
        return 1 - sum((s ** (n - 1) * qn(p) for n, qn in enumerate(dist.q, 1)), Fraction(0))
    p, t = float(p), float(t)
    # sum_n Q(n) (1 - (1 - t)^(n - 1)), accurate for small t
    acc = 0.0
    log_s = math.log1p(-t) if t < 1 else -math.inf
    for n, qn in enumerate(dist.q, 1):
        if n == 1:
            continue
        w = 1.0 if t == 1 else -math.expm1((n - 1) * log_s)
        acc += qn(p) * w
    return acc


def _walk_through_integers(p, t, exact: bool):
    if p == 1:
        return Fraction(1) if exact else 1.0
    if exact:
        p, t = Fraction(p), Fraction(t)
        return 1 - (1 - p) ** 2 / (1 - p * (1 - t)) ** 2
    p, t = float(p), float(t)
    a = p * t / (1 - p + p * t)
    return a * (2 - a)


def walk_through_free(n: int, p: float, t: float, tol: float = 1e-13, max_iter: int = 10**6) -> float:
    """Walk-through function of the free group of rank ``n`` (the ``2n``-regular tree).

    With ``s = 1 - t``, the generating function ``W`` of a branch hanging off
    an open edge solves ``W = s ((1 - p) + p W)^(2n - 1)``; the minimal
    solution is reached by iterating from ``W = 0``. The iteration runs on
    ``V = 1 - W`` to keep precision when ``t`` is small, and ``tol`` is
    relative to ``V``.
    """
    if n < 1:
        raise ValueError("rank must be positive")
    if p == 0:
        return 0.0
    if t == 1:
        return -math.expm1(2 * n * math.log1p(-p)) if p < 1 else 1.0
    if t == 0 and (2 * n - 1) * p <= 1:
        return 0.0
    log_s = math.log1p(-t)
    v = 1.0
    for _ in range(max_iter):
        inner = math.log1p(-p * v) if p * v < 1 else -math.inf
        v_next = -math.expm1(log_s + (2 * n - 1) * inner)
        # relative stopping rule: v is of order t when t is small
        if abs(v_next - v) <= tol * v_next or v_next == 0:
            v = v_next
            break
        v = v_next
    else:
        raise NoConvergenceError(
            f"branch fixed point for F{n} at p={p}, t={t} did not converge in {max_iter} steps"
        )
    inner = math.log1p(-p * v) if p * v < 1 else -math.inf
    return -math.expm1(2 * n * inner)
