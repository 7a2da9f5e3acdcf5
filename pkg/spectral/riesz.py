"""
Riesz projections by trapezoidal quadrature on circular contours.

P = (1/2πi)∮(wI - T)⁻¹ dw, counterclockwise. With w_k = c + r·e^{iθ_k},
θ_k = 2πk/N this becomes P ≈ (1/N)·Σ_k r·e^{iθ_k}·(w_kI - T)⁻¹.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from spectral.complexmat import (
    PIVOT_TOL,
    RANK_TOL,
    Basis,
    as_square,
    identity,
    lu_factor,
    norm_fro,
    rrqr,
    solve,
)
from spectral.errors import ClusterSeparationError, ContourError, SingularMatrixError
from spectral.spectrum import SpectrumReport

SAFETY = 0.8


@dataclass(frozen=True)
class Contour:
    center: complex
    radius: float
    nodes: int = 64

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"contour radius must be positive, got {self.radius}")
        if self.nodes < 4:
            raise ValueError(f"contour needs at least 4 nodes, got {self.nodes}")

    def points(self) -> np.ndarray:
        theta = 2 * np.pi * np.arange(self.nodes) / self.nodes
        return self.center + self.radius * np.exp(1j * theta)

    def encloses(self, z: complex) -> bool:
        return abs(z - self.center) < self.radius


@dataclass(frozen=True, eq=False)
class Projection:
    value: complex
    matrix: np.ndarray
    idem_residual: float
    contour: Contour

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))


@dataclass(frozen=True)
class KRReport:
    eigen_residual: float
    range_invariance_residual: float
    kernel_invariance_residual: float
    direct_sum_residual: float
    commutation_residual: float
    restricted_residual: float
    range_dim: int
    complement_dim: int
    dimension: int
    threshold: float
    ambiguous: bool

    @property
    def passed(self) -> bool:
        residuals = (
            self.eigen_residual,
            self.range_invariance_residual,
            self.kernel_invariance_residual,
            self.direct_sum_residual,
        )
        dims_ok = self.range_dim + self.complement_dim == self.dimension
        return dims_ok and all(r <= self.threshold for r in residuals)


def resolvent(T, w: complex, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """(wI - T)⁻¹."""
    T = as_square(T)
    n = T.shape[0]
    try:
        factors = lu_factor(w * identity(n) - T, pivot_tol)
    except SingularMatrixError as exc:
        raise ContourError(f"contour touches spectrum at w={w}", w=w) from exc
    return solve(factors, identity(n))


def riesz_projection(
    T,
    contour: Contour,
    value: Optional[complex] = None,
    pivot_tol: float = PIVOT_TOL,
    workers: int = 1,
) -> Projection:
    """Riesz projection for the part of σ(T) inside `contour`.

    An empty enclosure gives P ≈ 0. Node terms are summed in index order
    whatever `workers` is, so results do not depend on scheduling.
    """
    T = as_square(T)
    points = contour.points()

    def term(w):
        return (w - contour.center) * resolvent(T, w, pivot_tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            terms = list(pool.map(term, points))
    else:
        terms = [term(w) for w in points]

    P = np.zeros_like(T)
    for t in terms:
        P += t
    P /= contour.nodes

    return Projection(
        value=contour.center if value is None else complex(value),
        matrix=P,
        idem_residual=norm_fro(P @ P - P),
        contour=contour,
    )


def auto_contour(report: SpectrumReport, j: int, nodes: int = 64) -> Contour:
    """Circle around cluster j excluding every other cluster.

    A lone cluster gets radius spread + 1.
    """
    if not report.clusters:
        raise ValueError("spectrum report has no clusters")
    c = report.clusters[j]
    if len(report.clusters) == 1:
        return Contour(center=c.center, radius=c.spread + 1.0, nodes=nodes)
    if c.separation <= 10 * report.gap:
        raise ClusterSeparationError(
            f"cluster {j} is too close to its neighbours (separation {c.separation:.3e}, gap {report.gap:.3e})",
            cluster=j,
            separation=c.separation,
            gap=report.gap,
        )
    radius = max(2 * c.spread, SAFETY * c.separation / 2)
    return Contour(center=c.center, radius=radius, nodes=nodes)


def _rank_scale(P: Projection) -> float:
    return max(1.0, norm_fro(P.matrix))


def eigenspace(P: Projection, rank_tol: float = RANK_TOL) -> Basis:
    """Orthonormal basis of range(P); rank is judged against max(1, ‖P‖_F)."""
    basis, _ = rrqr(P.matrix, rank_tol, _rank_scale(P))
    return basis


def complement(P: Projection, rank_tol: float = RANK_TOL) -> Basis:
    """Orthonormal basis of ker(P), computed as range(I - P)."""
    n = P.matrix.shape[0]
    basis, _ = rrqr(identity(n) - P.matrix, rank_tol, _rank_scale(P))
    return basis


def enclosed_value(T, P: Projection) -> complex:
    """trace(TP)/trace(P), the mean eigenvalue inside the contour.

    Falls back to the contour center when the contour encloses nothing.
    """
    T = as_square(T)
    rank = P.trace
    if abs(rank) < 0.5:
        return complex(P.contour.center)
    return complex(np.trace(T @ P.matrix)) / rank


def verify_kr(
    T,
    value: complex,
    P: Projection,
    tol: float = 1e-8,
    rank_tol: float = RANK_TOL,
) -> KRReport:
    """Eigenspace/invariant-complement residuals for one Riesz projection."""
    T = as_square(T)
    n = T.shape[0]
    M = P.matrix
    I = identity(n)
    B = eigenspace(P, rank_tol)
    L = complement(P, rank_tol)
    TB = T @ B.columns
    return KRReport(
        eigen_residual=norm_fro(TB - value * B.columns) if B.rank else 0.0,
        range_invariance_residual=norm_fro((I - M) @ T @ M),
        kernel_invariance_residual=norm_fro(M @ T @ (I - M)),
        direct_sum_residual=norm_fro(M @ M - M),
        commutation_residual=norm_fro(T @ M - M @ T),
        restricted_residual=norm_fro(M @ T @ M - value * M),
        range_dim=B.rank,
        complement_dim=L.rank,
        dimension=n,
        threshold=tol * max(1.0, norm_fro(T)),
        ambiguous=B.ambiguous or L.ambiguous,
    )
