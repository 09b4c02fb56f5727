import random

import pytest

from freeperc.factors import FiniteCayleyGraph

# acceptance lines collected by test_acceptance.py, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


def circulant(k: int, gens, mult: int = 1) -> FiniteCayleyGraph:
    """Cayley graph of Z_k for the symmetric set generated by ``gens``.

    An involution ``s = k/2`` contributes one edge per pair of vertices; every
    other generator contributes ``x -- x+s``. ``mult`` repeats each edge.
    """
    edges = []
    for s in sorted(set(g % k for g in gens) - {0}):
        if 2 * s == k:
            edges += [(x, x + s) for x in range(s)]
        elif 2 * s < k:
            edges += [(x, (x + s) % k) for x in range(k)]
    return FiniteCayleyGraph(k, tuple(edges) * mult)


def random_cayley_multigraph(rng: random.Random, max_edges: int, min_edges: int = 1) -> FiniteCayleyGraph:
    """A connected circulant multigraph with ``min_edges..max_edges`` edges."""
    while True:
        k = rng.randint(2, 9)
        gens = [1] + rng.sample(range(1, k), min(k - 1, rng.randint(0, 2)))
        mult = rng.choice([1, 1, 1, 2])
        try:
            g = circulant(k, gens, mult)
        except Exception:
            continue
        if min_edges <= g.edge_count <= max_edges:
            return g


@pytest.fixture
def rnd():
    return random.Random(20241016)
