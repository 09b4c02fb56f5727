"""
Monte Carlo bond percolation on free-product Cayley graphs.

The cluster of the origin is grown breadth first. A vertex is a reduced
alternating word; when a vertex is first reached through a copy of factor
``i`` it still has to open up the copies of every other factor, and it sits
at the identity of each of those copies. Finite copies are explored edge by
edge inside the factor's Cayley graph; the integers and free groups are
explored as the regular trees they are (the integers being rank one).

Edge states come from :mod:`freeperc.rng`: the uniform attached to an edge is
a hash of the trial key and the edge's identity, and an edge is open iff its
uniform is below ``p``. This is a threshold coupling across ``p`` and makes
results independent of exploration order and of how trials are split across
workers.

Two engines implement the same exploration. :func:`explore_cluster` runs a
numba kernel that tracks only vertex hashes; :func:`explore_cluster_words`
is a slow pure-Python engine that carries the reduced words themselves and
checks that no word is visited twice.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import rng
from .errors import SupercriticalRequestError
from .factors import Cyclic, ExplicitFinite, Free, Integers, factor_graph
from .solver import FreeProduct, pc_numeric

__all__ = [
    "SimulationConfig",
    "SimulationEstimate",
    "ClusterTrace",
    "explore_cluster",
    "explore_cluster_words",
    "run_trials",
    "estimate_theta",
    "estimate_mean_cluster",
    "summarize_theta",
    "summarize_mean",
]

_KIND_FINITE = 0
_KIND_TREE = 1
NO_RADIUS_CAP = 2**62


@dataclass(frozen=True)
class SimulationConfig:
    p: float
    trials: int = 10_000
    size_cap: int = 100_000
    radius_cap: int = NO_RADIUS_CAP
    base_seed: int = 0

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.size_cap < 1:
            raise ValueError("size_cap must be at least 1")
        if self.radius_cap < 1:
            raise ValueError("radius_cap must be at least 1")


@dataclass(frozen=True)
class SimulationEstimate:
    """Sample mean with its standard error.

    ``cap_bias`` is the fraction of trials that finished with more than a
    tenth of ``size_cap`` vertices without hitting the cap. It is a proxy for
    the (one-sided) bias of survival-to-cap as an estimate of ``theta``.
    """

    mean: float
    std_error: float
    truncated_fraction: float
    trials: int
    cap_bias: float = 0.0


@dataclass(frozen=True)
class ClusterTrace:
    visited_count: int
    max_radius: int
    truncated: bool


# ---------------------------------------------------------------------------
# product encoding for the kernel
# ---------------------------------------------------------------------------


TABLE_MAX_EDGES = 16


@dataclass(frozen=True)
class _Encoded:
    kinds: np.ndarray
    ranks: np.ndarray
    nverts: np.ndarray
    nedges: np.ndarray
    bases: np.ndarray
    inc_off: np.ndarray
    inc_edge: np.ndarray
    inc_other: np.ndarray
    table_off: np.ndarray
    table: np.ndarray
    table_size: np.ndarray
    max_nv: int


def origin_component_table(graph) -> np.ndarray:
    """``table[mask]`` = bitmask of the origin's component when the edge slots in ``mask`` are open."""
    m = graph.edge_count
    masks = np.arange(1 << m, dtype=np.int64)
    reach = np.ones(1 << m, dtype=np.int64)
    for _ in range(graph.vertex_count - 1):
        for e, (u, v) in enumerate(graph.edges):
            o = (masks >> e) & 1
            reach |= ((o & (reach >> u)) & 1) << v
            reach |= ((o & (reach >> v)) & 1) << u
    return reach


def _encode(product: FreeProduct) -> _Encoded:
    flat = product.flattened().factors
    kinds, ranks, nverts, nedges, bases = [], [], [], [], []
    inc_off, inc_edge, inc_other = [0], [], []
    table_off, tables = [], []
    tpos = 0
    max_nv = 1
    for f in flat:
        bases.append(len(inc_off) - 1)
        if isinstance(f, (Cyclic, ExplicitFinite)):
            g = factor_graph(f)
            kinds.append(_KIND_FINITE)
            ranks.append(0)
            nverts.append(g.vertex_count)
            nedges.append(g.edge_count)
            max_nv = max(max_nv, g.vertex_count)
            # incidence lists per local vertex: (edge slot, other end)
            for x in range(g.vertex_count):
                for e, (u, v) in enumerate(g.edges):
                    if x in (u, v):
                        inc_edge.append(e)
                        inc_other.append(v if u == x else u)
                inc_off.append(len(inc_edge))
            if g.edge_count <= TABLE_MAX_EDGES and g.vertex_count < 63:
                # row ``mask`` holds the origin's component as a vertex bitmask
                table_off.append(tpos)
                tables.append(origin_component_table(g))
                tpos += len(tables[-1])
            else:
                table_off.append(-1)
        elif isinstance(f, (Integers, Free)):
            kinds.append(_KIND_TREE)
            ranks.append(1 if isinstance(f, Integers) else f.n)
            nverts.append(0)
            nedges.append(0)
            table_off.append(-1)
        else:
            raise TypeError(f"cannot simulate factor {f!r}")
    i64 = lambda xs: np.array(xs, dtype=np.int64)
    table = np.concatenate(tables) if tables else np.ones(1, dtype=np.int64)
    # vertices a row adds besides the origin
    table_size = np.bitwise_count(table).astype(np.int64) - 1
    return _Encoded(i64(kinds), i64(ranks), i64(nverts), i64(nedges), i64(bases),
                    i64(inc_off), i64(inc_edge), i64(inc_other), i64(table_off),
                    table, table_size, max_nv)


# ---------------------------------------------------------------------------
# numba kernel
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _explore_one(kinds, ranks, nverts, nedges, bases, inc_off, inc_edge, inc_other,
                 table_off, table, table_size, thr, key, size_cap, radius_cap,
                 qh, qt, lq_hash, lq_dir, in_comp, comp_list):
    nf = kinds.shape[0]
    qh[0] = key
    qt[0] = -1
    head = 0
    tail = 1
    count = 1
    max_depth = 0
    # queue depths are nondecreasing, so [head, level_end) shares depth d
    d = -1
    level_end = 0
    while head < tail:
        if head == level_end:
            d += 1
            level_end = tail
        vh = qh[head]
        et = qt[head]
        head += 1
        for i in range(nf):
            if i == et:
                continue
            c = rng.nb_copy_id(vh, i)
            if kinds[i] == 0:
                nv = nverts[i]
                if table_off[i] >= 0:
                    # sample every edge slot of the copy at once
                    mask = 0
                    for e in range(nedges[i]):
                        mask |= np.int64(rng.nb_edge_bits(c, np.uint64(e)) < thr) << e
                    row = table_off[i] + mask
                    new = table_size[row]
                    if new > 0 and (d >= radius_cap or count + new > size_cap):
                        if d < radius_cap and count < size_cap:
                            max_depth = d + 1
                            count = size_cap
                        return count, max_depth, True
                    # write every candidate, keep those in the component; avoids
                    # a data-dependent branch per vertex
                    comp = table[row]
                    for y in range(1, nv):
                        qh[tail] = rng.nb_child_vertex(c, np.uint64(y))
                        qt[tail] = i
                        tail += (comp >> y) & 1
                    count += new
                    if new > 0:
                        max_depth = d + 1
                else:
                    base = bases[i]
                    for x in range(nv):
                        in_comp[x] = False
                    in_comp[0] = True
                    comp_list[0] = 0
                    lhead = 0
                    ltail = 1
                    while lhead < ltail:
                        x = comp_list[lhead]
                        lhead += 1
                        for s in range(inc_off[base + x], inc_off[base + x + 1]):
                            y = inc_other[s]
                            if not in_comp[y] and rng.nb_edge_bits(c, np.uint64(inc_edge[s])) < thr:
                                in_comp[y] = True
                                comp_list[ltail] = y
                                ltail += 1
                    # emit the copy's new vertices in ascending local id
                    for y in range(1, nv):
                        if in_comp[y]:
                            if d >= radius_cap or count >= size_cap:
                                return count, max_depth, True
                            qh[tail] = rng.nb_child_vertex(c, np.uint64(y))
                            qt[tail] = i
                            tail += 1
                            count += 1
                            max_depth = d + 1
            else:
                ndir = 2 * ranks[i]
                lq_hash[0] = np.uint64(rng.FREE_ROOT)
                lq_dir[0] = -1
                lhead = 0
                ltail = 1
                while lhead < ltail:
                    lh = lq_hash[lhead]
                    last = lq_dir[lhead]
                    lhead += 1
                    for dr in range(ndir):
                        if last >= 0 and dr == (last ^ 1):
                            continue
                        child = rng.nb_free_child(lh, dr)
                        if rng.nb_edge_bits(c, child) < thr:
                            if d >= radius_cap or count >= size_cap:
                                return count, max_depth, True
                            lq_hash[ltail] = child
                            lq_dir[ltail] = dr
                            ltail += 1
                            qh[tail] = rng.nb_child_vertex(c, child)
                            qt[tail] = i
                            tail += 1
                            count += 1
                            max_depth = d + 1
    return count, max_depth, False


@njit(cache=True, nogil=True)
def _run_range(kinds, ranks, nverts, nedges, bases, inc_off, inc_edge, inc_other,
               table_off, table, table_size, max_nv, p, seed, size_cap, radius_cap, start, stop,
               out_count, out_depth, out_trunc):
    thr = np.uint64(math.ceil(p * 2.0**53))
    cap = size_cap + 1
    # slack for candidates written past the tail
    qh = np.empty(cap + max_nv, dtype=np.uint64)
    qt = np.empty(cap + max_nv, dtype=np.int8)
    lq_hash = np.empty(cap, dtype=np.uint64)
    lq_dir = np.empty(cap, dtype=np.int64)
    in_comp = np.zeros(max_nv, dtype=np.bool_)
    comp_list = np.empty(max_nv, dtype=np.int64)
    for trial in range(start, stop):
        key = rng.nb_trial_key(seed, trial)
        c, md, tr = _explore_one(kinds, ranks, nverts, nedges, bases, inc_off, inc_edge,
                                 inc_other, table_off, table, table_size, thr, key, size_cap, radius_cap,
                                 qh, qt, lq_hash, lq_dir, in_comp, comp_list)
        out_count[trial - start] = c
        out_depth[trial - start] = md
        out_trunc[trial - start] = tr


def _kernel_args(enc: _Encoded):
    return (enc.kinds, enc.ranks, enc.nverts, enc.nedges, enc.bases, enc.inc_off,
            enc.inc_edge, enc.inc_other, enc.table_off, enc.table, enc.table_size, enc.max_nv)


def _seed64(seed: int) -> np.uint64:
    return np.uint64(int(seed) & rng.MASK)


def run_trials(product: FreeProduct, config: SimulationConfig, workers: int | None = 1,
               chunk: int = 4096):
    """Run every trial of ``config``; returns per-trial ``(counts, depths, truncated)`` arrays.

    Trials are split into chunks that may run on several threads; each trial's
    result depends only on ``(base_seed, trial_index)``.
    """
    args = _kernel_args(_encode(product))
    n = config.trials
    counts = np.empty(n, dtype=np.int64)
    depths = np.empty(n, dtype=np.int64)
    trunc = np.empty(n, dtype=np.bool_)
    seed = _seed64(config.base_seed)
    radius_cap = min(int(config.radius_cap), NO_RADIUS_CAP)

    def work(start):
        stop = min(start + chunk, n)
        _run_range(*args, float(config.p), seed, int(config.size_cap), radius_cap,
                   start, stop, counts[start:stop], depths[start:stop], trunc[start:stop])

    starts = range(0, n, chunk)
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1:
        for s in starts:
            work(s)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, starts))
    return counts, depths, trunc


def explore_cluster(product: FreeProduct, config: SimulationConfig, trial_index: int) -> ClusterTrace:
    """Grow the origin's cluster for one trial with the compiled kernel."""
    single = SimulationConfig(config.p, trial_index + 1, config.size_cap, config.radius_cap,
                              config.base_seed)
    args = _kernel_args(_encode(product))
    out_c = np.empty(1, dtype=np.int64)
    out_d = np.empty(1, dtype=np.int64)
    out_t = np.empty(1, dtype=np.bool_)
    _run_range(*args, float(single.p), _seed64(single.base_seed),
               int(single.size_cap), min(int(single.radius_cap), NO_RADIUS_CAP),
               trial_index, trial_index + 1, out_c, out_d, out_t)
    return ClusterTrace(int(out_c[0]), int(out_d[0]), bool(out_t[0]))


# ---------------------------------------------------------------------------
# reference engine on explicit reduced words
# ---------------------------------------------------------------------------


def _free_inverse(direction: int) -> int:
    return direction ^ 1


def explore_cluster_words(product: FreeProduct, config: SimulationConfig, trial_index: int):
    """Pure-Python twin of :func:`explore_cluster` that keeps the reduced words.

    A word is a tuple of syllables ``(factor_index, element)``. Finite
    elements are local vertex ids, integers are ints, free-group elements are
    tuples of ``(generator, +1 | -1)``. Returns ``(trace, words)`` with the
    words in discovery order; raises ``AssertionError`` if a word repeats.
    """
    flat = product.flattened().factors
    p = float(config.p)
    key = rng.trial_key(config.base_seed & rng.MASK, trial_index)
    graphs = {i: factor_graph(f) for i, f in enumerate(flat) if f.is_finite}
    incidence = {}
    for i, g in graphs.items():
        inc = [[] for _ in range(g.vertex_count)]
        for e, (u, v) in enumerate(g.edges):
            inc[u].append((e, v))
            inc[v].append((e, u))
        incidence[i] = inc
    ranks = {i: (1 if isinstance(f, Integers) else f.n) for i, f in enumerate(flat) if not f.is_finite}

    origin = ()
    words = [origin]
    seen = {origin}
    queue = [(origin, key, -1)]
    head = 0
    max_depth = 0

    def add(word, vh, factor):
        nonlocal max_depth
        assert word not in seen, f"word {word} visited twice"
        seen.add(word)
        words.append(word)
        queue.append((word, vh, factor))
        max_depth = max(max_depth, len(word))

    while head < len(queue):
        word, vh, entered = queue[head]
        head += 1
        d = len(word)
        for i in range(len(flat)):
            if i == entered:
                continue
            c = rng.copy_id(vh, i)
            if i in graphs:
                comp = [0]
                in_comp = {0}
                for x in comp:
                    for e, y in incidence[i][x]:
                        if y not in in_comp and rng.edge_uniform(c, e) < p:
                            in_comp.add(y)
                            comp.append(y)
                for y in sorted(in_comp - {0}):
                    if d >= config.radius_cap or len(words) >= config.size_cap:
                        return ClusterTrace(len(words), max_depth, True), words
                    add(word + ((i, y),), rng.child_vertex(c, y), i)
            else:
                ndir = 2 * ranks[i]
                local = [((), rng.FREE_ROOT, -1)]
                for elem, lh, last in local:
                    for dr in range(ndir):
                        if last >= 0 and dr == _free_inverse(last):
                            continue
                        child = rng.free_child(lh, dr)
                        if rng.edge_uniform(c, child) < p:
                            if d >= config.radius_cap or len(words) >= config.size_cap:
                                return ClusterTrace(len(words), max_depth, True), words
                            letter = (dr // 2, 1 if dr % 2 == 0 else -1)
                            new_elem = elem + (letter,)
                            local.append((new_elem, child, dr))
                            shown = sum(s for _, s in new_elem) if ranks[i] == 1 else new_elem
                            add(word + ((i, shown),), rng.child_vertex(c, child), i)
    return ClusterTrace(len(words), max_depth, False), words


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------


def summarize_theta(counts: np.ndarray, truncated: np.ndarray, config: SimulationConfig) -> SimulationEstimate:
    """Survival-to-cap fraction of per-trial results, with binomial standard error."""
    n = len(truncated)
    theta = float(np.mean(truncated))
    se = math.sqrt(theta * (1 - theta) / n)
    big_finite = np.count_nonzero((~truncated) & (counts > config.size_cap // 10))
    return SimulationEstimate(theta, se, theta, n, big_finite / n)


def summarize_mean(counts: np.ndarray, truncated: np.ndarray, config: SimulationConfig) -> SimulationEstimate:
    """Sample mean of per-trial cluster sizes with its standard error."""
    n = len(counts)
    x = counts.astype(np.float64)
    mean = float(np.sum(x) / n)
    se = float(np.std(x, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return SimulationEstimate(mean, se, float(np.mean(truncated)), n)


def estimate_theta(product: FreeProduct, config: SimulationConfig, workers: int | None = 1) -> SimulationEstimate:
    """Fraction of trials whose cluster outgrows the caps, with binomial standard error."""
    counts, _, trunc = run_trials(product, config, workers)
    return summarize_theta(counts, trunc, config)


def estimate_mean_cluster(product: FreeProduct, config: SimulationConfig, workers: int | None = 1) -> SimulationEstimate:
    """Sample mean of the cluster size; only meaningful below the critical point."""
    pc = pc_numeric(product)
    if config.p >= pc:
        raise SupercriticalRequestError(
            f"mean cluster size is infinite at p={config.p} >= p_c={pc:.6f}"
        )
    counts, _, trunc = run_trials(product, config, workers)
    return summarize_mean(counts, trunc, config)
