"""
Tests for the dense complex kernel: LU, solves, powers, norms and rank.
"""

import numpy as np
import pytest

from spectral.complexmat import (
    as_matrix,
    as_square,
    determinant,
    identity,
    inverse,
    lu_factor,
    matmul,
    norm_fro,
    norm_op2_est,
    pivot_condition,
    power,
    rrqr,
    solve,
)
from spectral.errors import DimensionError, InvalidMatrixError, SingularMatrixError
from tests.helpers import random_complex


def test_lu_reconstructs_permuted_matrix(rng):
    """PA = LU with unit lower L."""
    A = random_complex(rng, 8)
    f = lu_factor(A)
    assert np.allclose(np.diag(f.lower()), 1.0)
    assert np.allclose(A[f.perm], f.lower() @ f.upper(), atol=1e-12)


def test_solve_matrix_and_vector(rng):
    """Solve accepts both matrix and vector right-hand sides."""
    A = random_complex(rng, 6)
    X = random_complex(rng, 6, 3)
    f = lu_factor(A)
    assert np.allclose(solve(f, A @ X), X, atol=1e-10)

    x = X[:, 0]
    y = solve(f, A @ x)
    assert y.shape == (6,)
    assert np.allclose(y, x, atol=1e-10)


def test_solve_rejects_wrong_rhs(rng):
    """Mismatched right-hand side is a dimension error."""
    f = lu_factor(random_complex(rng, 3))
    with pytest.raises(DimensionError):
        solve(f, np.ones((4, 1)))


def test_singular_matrix_names_stage():
    """Second column is twice the first: elimination stalls at stage 1."""
    with pytest.raises(SingularMatrixError) as info:
        lu_factor(np.array([[1, 2], [2, 4]], dtype=complex))
    assert info.value.stage == 1
    assert isinstance(info.value, np.linalg.LinAlgError)
    assert info.value.details()["stage"] == 1


def test_zero_matrix_is_singular_at_stage_zero():
    """The zero matrix fails at the first pivot."""
    with pytest.raises(SingularMatrixError) as info:
        lu_factor(np.zeros((3, 3)))
    assert info.value.stage == 0


def test_involution_inverse_and_determinant(involution):
    """The involution is its own inverse with determinant -1."""
    assert np.allclose(inverse(involution), involution, atol=1e-12)
    f = lu_factor(involution)
    assert abs(determinant(f) - (-1)) < 1e-12
    assert pivot_condition(f) >= 1.0


def test_determinant_matches_numpy(rng):
    """LU determinant against numpy."""
    A = random_complex(rng, 5)
    assert abs(determinant(lu_factor(A)) - np.linalg.det(A)) < 1e-10 * abs(np.linalg.det(A))


def test_power_positive_negative_zero(jordan, involution):
    """Integer powers, including negative and zero exponents."""
    assert np.array_equal(power(jordan, 0), identity(2))
    assert np.allclose(power(jordan, 5), [[1, 5], [0, 1]])
    assert np.allclose(power(jordan, -3), [[1, -3], [0, 1]])
    assert np.allclose(power(involution, 7), involution)
    assert np.allclose(power(involution, -4), identity(2))


def test_norm_estimate_matches_two_norm(rng):
    """Power-iteration estimate against the SVD 2-norm."""
    for _ in range(10):
        A = random_complex(rng, 7)
        exact = np.linalg.norm(A, 2)
        estimate = norm_op2_est(A, iters=1000)
        assert estimate <= exact * (1 + 1e-12)
        assert estimate >= exact * (1 - 1e-6)


def test_norm_estimate_edge_cases(involution):
    """Zero matrix, closed-form 2x2 norm and invalid iteration counts."""
    assert norm_op2_est(np.zeros((3, 3))) == 0.0
    # σ₁σ₂ = |det| = 1 and σ₁² + σ₂² = ‖A‖_F² = 198
    sigma = np.sqrt((198 + np.sqrt(198 ** 2 - 4)) / 2)
    assert abs(norm_op2_est(involution) - sigma) < 1e-10
    with pytest.raises(ValueError):
        norm_op2_est(involution, iters=0)


def test_norm_fro():
    """Frobenius norm against numpy."""
    assert norm_fro(np.array([[3, 4j]])) == 5.0


def test_rrqr_rank_and_orthonormality(rng):
    """RRQR recovers the rank with an orthonormal basis."""
    A = random_complex(rng, 6, 2) @ random_complex(rng, 2, 6)
    basis, rank = rrqr(A)
    assert rank == 2
    Q = basis.columns
    assert np.allclose(Q.conj().T @ Q, np.eye(2), atol=1e-12)
    # A's columns lie in span(Q)
    assert np.allclose(Q @ (Q.conj().T @ A), A, atol=1e-10)
    assert not basis.ambiguous


def test_rrqr_zero_matrix():
    """Zero matrix has rank 0."""
    basis, rank = rrqr(np.zeros((4, 4)))
    assert rank == 0
    assert basis.columns.shape == (4, 0)


def test_rrqr_flags_ambiguous_rank():
    """A singular value within a factor 10 of rank_tol·‖A‖_F is flagged."""
    A = np.diag([1.0, 3e-10]).astype(complex)
    basis, rank = rrqr(A, rank_tol=1e-10)
    assert rank == 2
    assert basis.ambiguous


def test_validation_errors():
    """Non-finite, non-2-D, empty and mismatched inputs are rejected."""
    with pytest.raises(InvalidMatrixError):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(ValueError):
        as_matrix(np.ones(3))
    with pytest.raises(InvalidMatrixError):
        as_matrix(np.zeros((0, 2)))
    with pytest.raises(DimensionError):
        as_square(np.ones((2, 3)))
    with pytest.raises(DimensionError):
        matmul(np.ones((2, 3)), np.ones((2, 3)))


def test_worked_products_and_inverses(involution):
    """Products and inverses with exact answers."""
    assert np.array_equal(matmul(identity(2), involution), involution)
    assert np.array_equal(matmul(involution, involution), identity(2))
    assert np.allclose(inverse(np.array([[1, 1], [2, 3]])), [[3, -1], [-2, 1]], atol=1e-14)
    assert np.allclose(solve(lu_factor(np.diag([2, 4])), identity(2)), np.diag([0.5, 0.25]))


def test_permutation_matrix_factors():
    """A swap matrix factors with one row exchange."""
    f = lu_factor(np.array([[0, 1], [1, 0]]))
    assert list(f.perm) == [1, 0]
    assert f.parity == -1
    assert np.array_equal(f.lu, identity(2))


def test_simple_norms():
    """Norms of identity and diagonal matrices."""
    assert norm_fro(identity(2)) == pytest.approx(np.sqrt(2))
    assert norm_op2_est(np.diag([3, 1])) == pytest.approx(3.0)


def test_rrqr_on_projection():
    """Identity has full rank; a rank-1 projection has the expected range."""
    basis, rank = rrqr(identity(3))
    assert rank == 3
    basis, rank = rrqr(np.array([[3, -1], [6, -2]]))
    assert rank == 1
    b = basis.columns[:, 0]
    assert abs(abs(np.vdot(b, np.array([1, 2]) / np.sqrt(5))) - 1) < 1e-12


def test_norm_sandwich(rng):
    """‖A‖₂ <= ‖A‖_F <= √rank·‖A‖₂."""
    for rank in (1, 3, 5):
        A = random_complex(rng, 5, rank) @ random_complex(rng, rank, 5)
        two = norm_op2_est(A, iters=1000)
        assert two <= norm_fro(A) <= np.sqrt(rank) * two * (1 + 1e-6)
