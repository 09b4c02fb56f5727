"""
Counter-based randomness for the cluster explorer.

Every edge of the (infinite) free-product Cayley graph gets its uniform
variate from a hash of the trial key and the edge's identity, so the random
configuration does not depend on the order in which edges are looked at.
Vertex identities are hash chains along the reduced-word normal form.

The mixing function is the SplitMix64 finaliser. Each function exists twice:
a numba version for the fast kernel and a pure-Python version for the
reference explorer. The two are tested against each other.
"""

import numpy as np
from numba import njit

MASK = (1 << 64) - 1

GOLDEN = 0x9E3779B97F4A7C15
C_FACTOR = 0xD1B54A32D192ED03
C_EDGE = 0xABC98388FB8FAC03
C_VERTEX = 0x8CB92BA72F3D8DD7
C_FREE = 0xDB4F0B9175AE2165
FREE_ROOT = 0x2545F4914F6CDD1D

_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_INV_2_53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * _M1) & MASK
    z = ((z ^ (z >> 27)) * _M2) & MASK
    return z ^ (z >> 31)


def trial_key(base_seed: int, trial: int) -> int:
    return mix64(mix64(base_seed) ^ (((trial + 1) * GOLDEN) & MASK))


def copy_id(vertex_hash: int, factor: int) -> int:
    return vertex_hash ^ (((factor + 1) * C_FACTOR) & MASK)


def edge_uniform(copy: int, tag: int) -> float:
    return (mix64(copy + (tag + 1) * C_EDGE) >> 11) * _INV_2_53


def child_vertex(copy: int, code: int) -> int:
    return mix64(copy ^ (((code + 1) * C_VERTEX) & MASK))


def free_child(local: int, direction: int) -> int:
    return mix64(local * C_FREE + direction + 1)


# numba twins -------------------------------------------------------------

_U_MASK = np.uint64(MASK)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_UM1 = np.uint64(_M1)
_UM2 = np.uint64(_M2)
_UGOLDEN = np.uint64(GOLDEN)
_UC_FACTOR = np.uint64(C_FACTOR)
_UC_EDGE = np.uint64(C_EDGE)
_UC_VERTEX = np.uint64(C_VERTEX)
_UC_FREE = np.uint64(C_FREE)
_ONE = np.uint64(1)


@njit(cache=True, inline="always")
def nb_mix64(z):
    z = (z ^ (z >> _U30)) * _UM1
    z = (z ^ (z >> _U27)) * _UM2
    return z ^ (z >> _U31)


@njit(cache=True)
def nb_trial_key(base_seed, trial):
    return nb_mix64(nb_mix64(base_seed) ^ ((np.uint64(trial) + _ONE) * _UGOLDEN))


@njit(cache=True, inline="always")
def nb_copy_id(vertex_hash, factor):
    return vertex_hash ^ ((np.uint64(factor) + _ONE) * _UC_FACTOR)


@njit(cache=True, inline="always")
def nb_edge_uniform(copy, tag):
    return np.float64(nb_mix64(copy + (tag + _ONE) * _UC_EDGE) >> _U11) * _INV_2_53


@njit(cache=True, inline="always")
def nb_child_vertex(copy, code):
    return nb_mix64(copy ^ ((code + _ONE) * _UC_VERTEX))


@njit(cache=True, inline="always")
def nb_free_child(local, direction):
    return nb_mix64(local * _UC_FREE + np.uint64(direction) + _ONE)


@njit(cache=True, inline="always")
def nb_edge_bits(copy, tag):
    """Top 53 bits of the edge hash; open iff below ``ceil(p * 2**53)``."""
    return nb_mix64(copy + (tag + _ONE) * _UC_EDGE) >> _U11
