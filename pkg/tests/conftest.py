"""
Shared fixtures: the two worked 2x2 operators and a seeded generator.
"""

import numpy as np
import pytest


@pytest.fixture
def involution():
    """A² = I; eigenvalues ±1 with eigenvectors (1, 2) and (1, 3)."""
    return np.array([[5, -2], [12, -5]], dtype=complex)


@pytest.fixture
def jordan():
    return np.array([[1, 1], [0, 1]], dtype=complex)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(12345))
