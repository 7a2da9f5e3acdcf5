"""
Small oracles shared by the test modules.
"""

import itertools

import numpy as np


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def multiset_distance(a, b):
    """Max distance under the best pairing of two equal-size multisets."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    assert a.size == b.size
    if a.size <= 6:
        return min(
            float(np.max(np.abs(a - b[list(p)]))) for p in itertools.permutations(range(b.size))
        )
    # greedy nearest pairing for larger sets
    remaining = list(b)
    worst = 0.0
    for z in a:
        j = int(np.argmin([abs(z - w) for w in remaining]))
        worst = max(worst, abs(z - remaining.pop(j)))
    return worst


def charpoly_roots(A):
    """Eigenvalues of a 1x1, 2x2 or 3x3 matrix as roots of its characteristic polynomial."""
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    tr = np.trace(A)
    det = np.linalg.det(A)
    if n == 1:
        return np.array([A[0, 0]])
    if n == 2:
        return np.roots([1.0, -tr, det])
    if n == 3:
        c1 = (tr ** 2 - np.trace(A @ A)) / 2
        return np.roots([1.0, -tr, c1, -det])
    raise ValueError("charpoly_roots handles n <= 3")


def partition(clusters):
    return frozenset(frozenset(c.indices) for c in clusters)
