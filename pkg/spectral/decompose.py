"""
Finite-spectrum decomposition T = Σ λ_j P_j and the certificate built on it.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from spectral.complexmat import (
    PIVOT_TOL,
    RANK_TOL,
    as_square,
    identity,
    lu_factor,
    norm_fro,
    norm_op2_est,
    power,
)
from spectral.errors import (
    CoincidentValuesError,
    MultipleClustersError,
    NotInvertibleError,
    SingularMatrixError,
)
from spectral.riesz import KRReport, Projection, auto_contour, riesz_projection, verify_kr
from spectral.spectrum import SpectrumReport, spectral_order_key, spectrum_report, unimodularity_check

DECOMPOSABLE = "decomposable"
NOT_DECOMPOSABLE = "not-decomposable"
MIN_VALUE_DISTANCE = 1e-10


@dataclass(frozen=True, eq=False)
class ProjectionBundle:
    projections: List[Projection]
    report: SpectrumReport
    resolution_residual: float
    orthogonality_residual: float
    reconstruction_residual: float
    commutation_residual: float
    pair_idempotence_residual: float
    kr_reports: List[KRReport] = field(default_factory=list)

    @property
    def values(self) -> List[complex]:
        return [p.value for p in self.projections]


@dataclass(frozen=True)
class GelfandReport:
    value: complex
    gelfand_residual: float
    unimodular_deviation: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.gelfand_residual <= self.threshold


@dataclass(frozen=True, eq=False)
class Certificate:
    algebraic_residual: float
    lagrange_agreement: float
    gelfand_residual: Optional[float]
    unimodular_deviation: float
    resolution_residual: float
    orthogonality_residual: float
    reconstruction_residual: float
    threshold: float
    verdict: str
    power_bounded: bool
    bundle: ProjectionBundle
    lagrange: List[np.ndarray]

    def residuals(self) -> Dict[str, float]:
        out = {
            "algebraic_residual": self.algebraic_residual,
            "lagrange_agreement": self.lagrange_agreement,
            "unimodular_deviation": self.unimodular_deviation,
            "resolution_residual": self.resolution_residual,
            "orthogonality_residual": self.orthogonality_residual,
            "reconstruction_residual": self.reconstruction_residual,
        }
        if self.gelfand_residual is not None:
            out["gelfand_residual"] = self.gelfand_residual
        return out


def _require_invertible(T: np.ndarray, pivot_tol: float) -> None:
    try:
        lu_factor(T, pivot_tol)
    except SingularMatrixError as exc:
        raise NotInvertibleError(
            f"operator is singular (pivot stage {exc.stage}); power-bounded operators are invertible",
            reason="singular",
            stage=exc.stage,
        ) from exc


def spectral_decomposition(
    T,
    gap: Optional[float] = None,
    nodes: int = 64,
    tol: float = 1e-8,
    pivot_tol: float = PIVOT_TOL,
    rank_tol: float = RANK_TOL,
    workers: int = 1,
) -> ProjectionBundle:
    """One Riesz projection per spectral cluster, with the identity residuals."""
    T = as_square(T)
    n = T.shape[0]
    _require_invertible(T, pivot_tol)
    report = spectrum_report(T, gap)
    for c in report.clusters:
        if abs(c.center) <= tol:
            raise NotInvertibleError(
                f"cluster at {c.center} lies on 0 within tol", reason="zero-cluster"
            )

    contours = [auto_contour(report, j, nodes) for j in range(len(report.clusters))]

    def project(j):
        return riesz_projection(T, contours[j], value=report.clusters[j].center, pivot_tol=pivot_tol)

    indices = range(len(contours))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            projections = list(pool.map(project, indices))
    else:
        projections = [project(j) for j in indices]

    I = identity(n)
    mats = [p.matrix for p in projections]
    total = np.zeros_like(T)
    weighted = np.zeros_like(T)
    for p in projections:
        total += p.matrix
        weighted += p.value * p.matrix

    orthogonality = 0.0
    pair_idempotence = 0.0
    for i in range(len(mats)):
        for j in range(len(mats)):
            if i == j:
                continue
            orthogonality = max(orthogonality, norm_fro(mats[i] @ mats[j]))
            if i < j:
                Q = mats[i] + mats[j]
                pair_idempotence = max(pair_idempotence, norm_fro(Q @ Q - Q))

    return ProjectionBundle(
        projections=projections,
        report=report,
        resolution_residual=norm_fro(total - I),
        orthogonality_residual=orthogonality,
        reconstruction_residual=norm_fro(T - weighted),
        commutation_residual=max(norm_fro(T @ M - M @ T) for M in mats),
        pair_idempotence_residual=pair_idempotence,
        kr_reports=[verify_kr(T, p.value, p, tol, rank_tol) for p in projections],
    )


def lagrange_projections(T, values: Sequence[complex]) -> List[np.ndarray]:
    """P_j = Π_{i≠j}(T - λ_iI) / Π_{i≠j}(λ_j - λ_i)."""
    T = as_square(T)
    lam = np.asarray(values, dtype=np.complex128).ravel()
    if lam.size == 0:
        raise ValueError("values must be nonempty")
    if lam.size > 1:
        dist = np.abs(lam[:, None] - lam[None, :])
        np.fill_diagonal(dist, np.inf)
        closest = float(dist.min())
        if closest <= MIN_VALUE_DISTANCE:
            raise CoincidentValuesError(
                f"values must be pairwise distinct (closest pair {closest:.3e} apart)",
                min_distance=closest,
            )
    I = identity(T.shape[0])
    factors = [T - v * I for v in lam]
    projections = []
    for j, vj in enumerate(lam):
        numerator = I.copy()
        denominator = 1.0 + 0j
        for i, vi in enumerate(lam):
            if i != j:
                numerator = numerator @ factors[i]
                denominator *= vj - vi
        projections.append(numerator / denominator)
    return projections


def algebraic_certificate(T, values: Sequence[complex]) -> float:
    """‖Π_j(T - λ_jI)‖_F / Π_j(‖T‖_F + |λ_j|), factors in ascending argument."""
    T = as_square(T)
    ordered = sorted((complex(v) for v in values), key=spectral_order_key)
    if not ordered:
        raise ValueError("values must be nonempty")
    I = identity(T.shape[0])
    t_norm = norm_fro(T)
    product = I
    denominator = 1.0
    for v in ordered:
        product = product @ (T - v * I)
        denominator *= t_norm + abs(v)
    return norm_fro(product) / denominator


def gelfand_check(T, tol: float = 1e-8, gap: Optional[float] = None) -> GelfandReport:
    """Single-cluster spectrum: how far T is from λ̄I."""
    T = as_square(T)
    report = spectrum_report(T, gap)
    if len(report.clusters) != 1:
        raise MultipleClustersError(
            f"spectrum has {len(report.clusters)} clusters; use spectral_decomposition",
            clusters=len(report.clusters),
        )
    value = report.clusters[0].center
    return GelfandReport(
        value=value,
        gelfand_residual=norm_fro(T - value * identity(T.shape[0])),
        unimodular_deviation=abs(abs(value) - 1.0),
        threshold=tol * max(1.0, norm_fro(T)),
    )


def certify(
    T,
    gap: Optional[float] = None,
    nodes: int = 64,
    tol: float = 1e-8,
    pivot_tol: float = PIVOT_TOL,
    rank_tol: float = RANK_TOL,
    workers: int = 1,
) -> Certificate:
    """Run the decomposition, Lagrange, algebraic and unimodularity checks."""
    T = as_square(T)
    bundle = spectral_decomposition(T, gap, nodes, tol, pivot_tol, rank_tol, workers)
    values = bundle.values
    lagrange = lagrange_projections(T, values)
    agreement = max(norm_fro(L - p.matrix) for L, p in zip(lagrange, bundle.projections))
    algebraic = algebraic_certificate(T, values)
    gelfand = None
    if len(values) == 1:
        gelfand = norm_fro(T - values[0] * identity(T.shape[0]))
    unimodular, deviation = unimodularity_check(bundle.report, tol)

    threshold = tol * max(1.0, norm_fro(T))
    checked = [
        bundle.resolution_residual,
        bundle.orthogonality_residual,
        bundle.reconstruction_residual,
        algebraic,
        agreement,
    ]
    if gelfand is not None:
        checked.append(gelfand)
    decomposable = all(r <= threshold for r in checked)

    return Certificate(
        algebraic_residual=algebraic,
        lagrange_agreement=agreement,
        gelfand_residual=gelfand,
        unimodular_deviation=deviation,
        resolution_residual=bundle.resolution_residual,
        orthogonality_residual=bundle.orthogonality_residual,
        reconstruction_residual=bundle.reconstruction_residual,
        threshold=threshold,
        verdict=DECOMPOSABLE if decomposable else NOT_DECOMPOSABLE,
        power_bounded=decomposable and unimodular,
        bundle=bundle,
        lagrange=lagrange,
    )


def power_identity_residuals(
    T, bundle: ProjectionBundle, powers: Iterable[int] = range(-3, 4)
) -> Dict[int, float]:
    """‖Tⁿ - Σ λ_jⁿ P_j‖_F for each requested n."""
    T = as_square(T)
    out = {}
    for k in powers:
        expansion = np.zeros_like(T)
        for p in bundle.projections:
            expansion += p.value ** k * p.matrix
        out[int(k)] = norm_fro(power(T, k) - expansion)
    return out


def power_bound_from_projections(bundle: ProjectionBundle) -> float:
    """Σ_j ‖P_j‖₂, which bounds sup_n ‖Tⁿ‖₂ when every |λ_j| = 1."""
    return float(sum(norm_op2_est(p.matrix) for p in bundle.projections))
