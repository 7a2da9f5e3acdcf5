"""
Dense complex linear-algebra kernel.

Matrices are 2-D ``complex128`` numpy arrays (row-major). Factorizations are
written out here: LU with partial pivoting, forward/back substitution,
column-pivoted modified Gram-Schmidt, and power iteration for the 2-norm.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from spectral.errors import DimensionError, InvalidMatrixError, SingularMatrixError

EPS = np.finfo(float).eps
PIVOT_TOL = 1e-13
RANK_TOL = 1e-10
NORM_ITERS = 100


@dataclass(frozen=True, eq=False)
class LUFactors:
    """PA = LU with L unit-lower and U upper, packed in `lu`.

    Row i of PA is row perm[i] of A.
    """
    perm: np.ndarray
    lu: np.ndarray
    parity: int

    @property
    def n(self) -> int:
        return self.lu.shape[0]

    def lower(self) -> np.ndarray:
        return np.tril(self.lu, -1) + np.eye(self.n, dtype=complex)

    def upper(self) -> np.ndarray:
        return np.triu(self.lu)


@dataclass(frozen=True, eq=False)
class Basis:
    """Orthonormal columns spanning a numerical column space."""
    columns: np.ndarray
    rank: int
    pivots: Tuple[int, ...] = ()
    ambiguous: bool = False
    residual_norms: Tuple[float, ...] = field(default=())


def as_matrix(A, name: str = "A") -> np.ndarray:
    """Validate and convert to a finite 2-D complex128 array."""
    arr = np.asarray(A, dtype=np.complex128)
    if arr.ndim != 2:
        raise InvalidMatrixError(f"{name} must be 2-D, got {arr.ndim}-D", reason="ndim")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InvalidMatrixError(f"{name} must have positive dimensions", reason="empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidMatrixError(f"{name} contains NaN or Inf", reason="non-finite")
    return arr


def as_square(A, name: str = "A") -> np.ndarray:
    arr = as_matrix(A, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got {arr.shape}", shapes=[list(arr.shape)])
    return arr


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def matmul(A, B) -> np.ndarray:
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape[1] != B.shape[0]:
        raise DimensionError(
            f"cannot multiply {A.shape} by {B.shape}",
            shapes=[list(A.shape), list(B.shape)],
        )
    return A @ B


def norm_inf(A) -> float:
    return float(np.max(np.sum(np.abs(A), axis=1)))


def norm_fro(A) -> float:
    A = as_matrix(A)
    return float(np.sqrt(np.sum(A.real ** 2 + A.imag ** 2)))


def lu_factor(A, pivot_tol: float = PIVOT_TOL) -> LUFactors:
    """Partial-pivoting LU. Raises SingularMatrixError naming the stage."""
    A = as_square(A)
    n = A.shape[0]
    lu = A.copy()
    perm = np.arange(n)
    parity = 1
    threshold = pivot_tol * norm_inf(A)

    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        pivot = abs(lu[p, k])
        if pivot == 0.0 or pivot < threshold:
            raise SingularMatrixError(
                f"matrix is singular to working precision at stage {k}",
                stage=k,
                pivot=float(pivot),
                threshold=float(threshold),
            )
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
            parity = -parity
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])

    return LUFactors(perm=perm, lu=lu, parity=parity)


def solve(f: LUFactors, B) -> np.ndarray:
    """Solve AX = B given the factors of A. A 1-D B is treated as one column."""
    vector = np.ndim(B) == 1
    B = as_matrix(np.reshape(B, (-1, 1)) if vector else B, "B")
    n = f.n
    if B.shape[0] != n:
        raise DimensionError(
            f"right-hand side has {B.shape[0]} rows, factors are {n}x{n}",
            shapes=[[n, n], list(B.shape)],
        )
    lu = f.lu
    X = B[f.perm].copy()
    for i in range(1, n):
        X[i] -= lu[i, :i] @ X[:i]
    for i in range(n - 1, -1, -1):
        X[i] = (X[i] - lu[i, i + 1:] @ X[i + 1:]) / lu[i, i]
    return X[:, 0] if vector else X


def inverse(A, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    A = as_square(A)
    return solve(lu_factor(A, pivot_tol), identity(A.shape[0]))


def determinant(f: LUFactors) -> complex:
    return complex(f.parity * np.prod(np.diag(f.lu)))


def pivot_condition(f: LUFactors) -> float:
    """Cheap κ proxy: ratio of largest to smallest |u_ii|."""
    pivots = np.abs(np.diag(f.lu))
    return float(pivots.max() / pivots.min())


def power(A, k: int, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """A**k by repeated squaring; negative k goes through the inverse."""
    A = as_square(A)
    base = inverse(A, pivot_tol) if k < 0 else A
    k = abs(k)
    result = identity(A.shape[0])
    while k:
        if k & 1:
            result = result @ base
        base = base @ base
        k >>= 1
    return result


@lru_cache(maxsize=64)
def _start_vector(n: int) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(0))
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    x.setflags(write=False)
    return x


def norm_op2_est(A, iters: int = NORM_ITERS) -> float:
    """Largest singular value by power iteration on AᴴA.

    The estimate ‖Ax‖ for unit x never exceeds the true 2-norm, and
    the result is clamped to ‖A‖_F.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    A = as_matrix(A)
    if not np.any(A):
        return 0.0
    AH = A.conj().T
    x = _start_vector(A.shape[1])
    sigma = 0.0
    for _ in range(iters):
        y = A @ x
        estimate = float(np.linalg.norm(y))
        z = AH @ y
        z_norm = np.linalg.norm(z)
        if z_norm == 0.0:
            break
        x = z / z_norm
        if abs(estimate - sigma) <= 4 * EPS * estimate:
            sigma = estimate
            break
        sigma = estimate
    return min(max(sigma, float(np.linalg.norm(A @ x))), norm_fro(A))


def rrqr(A, rank_tol: float = RANK_TOL, scale: Optional[float] = None) -> Tuple[Basis, int]:
    """Column-pivoted modified Gram-Schmidt with one reorthogonalization pass.

    A pivot is accepted while its residual column norm exceeds
    rank_tol·scale, where scale defaults to ‖A‖_F. `ambiguous` is set when
    any inspected pivot lies within a factor 10 of that threshold.
    """
    A = as_matrix(A)
    m, ncols = A.shape
    if scale is None:
        scale = norm_fro(A)
    empty = np.zeros((m, 0), dtype=np.complex128)
    if scale == 0.0 or not np.any(A):
        return Basis(columns=empty, rank=0), 0

    threshold = rank_tol * scale
    W = A.copy()
    Q = empty
    remaining = list(range(ncols))
    pivots = []
    residuals = []
    ambiguous = False

    while remaining and Q.shape[1] < m:
        norms = np.linalg.norm(W[:, remaining], axis=0)
        idx = int(np.argmax(norms))
        best = float(norms[idx])
        if threshold / 10 < best < threshold * 10:
            ambiguous = True
        if best <= threshold:
            break
        col = remaining.pop(idx)
        q = W[:, col] / best
        if Q.shape[1]:
            q = q - Q @ (Q.conj().T @ q)
        q = q / np.linalg.norm(q)
        Q = np.column_stack([Q, q])
        pivots.append(col)
        residuals.append(best)
        if remaining:
            W[:, remaining] -= np.outer(q, q.conj() @ W[:, remaining])

    basis = Basis(
        columns=Q,
        rank=Q.shape[1],
        pivots=tuple(pivots),
        ambiguous=ambiguous,
        residual_norms=tuple(residuals),
    )
    return basis, basis.rank
