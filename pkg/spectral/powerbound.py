"""
Power-boundedness: growth profiles of ‖Tⁿ‖ over n = -N..N, growth
classification, similarity to a diagonal unimodular operator, and seeded
generators of bounded and defective test operators.

Random streams use numpy's counter-based Philox generator; ensembles split a
root seed with SeedSequence.spawn so shards stay reproducible.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from spectral.complexmat import (
    PIVOT_TOL,
    RANK_TOL,
    as_square,
    identity,
    inverse,
    norm_fro,
    norm_op2_est,
)
from spectral.decompose import DECOMPOSABLE, Certificate, certify
from spectral.errors import (
    GenerationError,
    NotDecomposableError,
    NotInvertibleError,
    SingularMatrixError,
)
from spectral.riesz import eigenspace

ESCAPE_NORM = 1e100
MAX_RESAMPLES = 100

BOUNDED = "bounded"
POLYNOMIAL = "polynomial"
EXPONENTIAL = "exponential"


@dataclass(frozen=True, eq=False)
class PowerProfile:
    """‖Tⁿ‖₂ estimates; exponents[i] pairs with norms[i]."""
    horizon: int
    exponents: np.ndarray
    norms: np.ndarray
    sup_observed: float
    escaped: bool = False

    @property
    def zero_index(self) -> int:
        return int(np.flatnonzero(self.exponents == 0)[0])

    def norm_at(self, k: int) -> Optional[float]:
        hit = np.flatnonzero(self.exponents == k)
        return float(self.norms[hit[0]]) if hit.size else None


@dataclass(frozen=True)
class PowerVerdict:
    bounded: bool
    growth_class: str
    degree: Optional[float] = None
    rate: Optional[float] = None
    evidence: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class SimilarityPair:
    V: np.ndarray
    D: np.ndarray
    residual: float
    cond_estimate: float
    dims: Tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class GroundTruth:
    V: np.ndarray
    V_inv: np.ndarray
    diagonal: np.ndarray
    values: List[complex]
    multiplicities: List[int]
    projections: List[np.ndarray]
    cond: float
    seed: Optional[int]


def power_profile(T, horizon: int = 256, iters: int = 100, pivot_tol: float = PIVOT_TOL) -> PowerProfile:
    """Sequential products T^{n+1} = T·Tⁿ and T^{-(n+1)} = T⁻¹·T^{-n}.

    A side stops at the first norm above 1e100; the profile is then marked
    as escaped.
    """
    T = as_square(T)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    try:
        T_inv = inverse(T, pivot_tol)
    except SingularMatrixError as exc:
        raise NotInvertibleError(
            f"operator is singular (pivot stage {exc.stage})", reason="singular", stage=exc.stage
        ) from exc

    escaped = False
    sides = []
    for step in (T, T_inv):
        current = identity(T.shape[0])
        norms = []
        for _ in range(horizon):
            current = step @ current
            value = norm_op2_est(current, iters) if np.all(np.isfinite(current)) else np.inf
            if not value <= ESCAPE_NORM:
                escaped = True
                if np.isfinite(value):
                    norms.append(value)
                break
            norms.append(value)
        sides.append(norms)

    positive, negative = sides
    exponents = np.concatenate(
        [-np.arange(len(negative), 0, -1), [0], np.arange(1, len(positive) + 1)]
    ).astype(int)
    norms = np.concatenate([negative[::-1], [1.0], positive]).astype(float)
    return PowerProfile(
        horizon=horizon,
        exponents=exponents,
        norms=norms,
        sup_observed=float(norms.max()),
        escaped=escaped,
    )


def _envelope(profile: PowerProfile) -> np.ndarray:
    """e(k) = max_{|j|<=k} ‖T^j‖ over available exponents."""
    K = int(np.abs(profile.exponents).max())
    g = np.zeros(K + 1)
    for k, value in zip(np.abs(profile.exponents), profile.norms):
        g[k] = max(g[k], value)
    return np.maximum.accumulate(g)


def _fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), rms


def diagnose(
    profile: PowerProfile,
    growth_tol: float = 1.5,
    semilog_slope_tol: float = 0.01,
    polynomial_slope_min: float = 0.5,
) -> PowerVerdict:
    """Classify growth from log-log and semilog fits of the running maximum over [N/4, N]."""
    if profile.horizon < 16:
        raise ValueError("diagnose needs a profile horizon of at least 16")
    envelope = _envelope(profile)
    K = envelope.size - 1
    start = max(1, K // 4)
    ks = np.arange(start, K + 1)
    log_e = np.log(envelope[ks])
    first_quartile_max = float(envelope[start])

    if ks.size >= 2:
        loglog_slope, loglog_rms = _fit(np.log(ks), log_e)
        semilog_slope, semilog_rms = _fit(ks.astype(float), log_e)
    else:
        loglog_slope, loglog_rms = np.inf, np.inf
        semilog_slope, semilog_rms = float(log_e[-1] / max(K, 1)), 0.0

    evidence = {
        "window": [int(start), int(K)],
        "loglog_slope": loglog_slope,
        "loglog_rms": loglog_rms,
        "semilog_slope": semilog_slope,
        "semilog_rms": semilog_rms,
        "sup_observed": profile.sup_observed,
        "first_quartile_max": first_quartile_max,
        "escaped": profile.escaped,
    }

    bounded = (
        not profile.escaped
        and profile.sup_observed <= growth_tol * first_quartile_max
        and semilog_slope <= semilog_slope_tol
        and loglog_slope < polynomial_slope_min
    )
    if bounded:
        return PowerVerdict(bounded=True, growth_class=BOUNDED, evidence=evidence)

    polynomial = (
        not profile.escaped
        and loglog_slope >= polynomial_slope_min
        and (semilog_slope <= semilog_slope_tol or loglog_rms <= semilog_rms)
    )
    if polynomial:
        return PowerVerdict(bounded=False, growth_class=POLYNOMIAL, degree=loglog_slope, evidence=evidence)
    return PowerVerdict(bounded=False, growth_class=EXPONENTIAL, rate=semilog_slope, evidence=evidence)


def sznagy_similarity(
    T,
    gap: Optional[float] = None,
    nodes: int = 64,
    tol: float = 1e-8,
    pivot_tol: float = PIVOT_TOL,
    rank_tol: float = RANK_TOL,
    certificate: Optional[Certificate] = None,
) -> SimilarityPair:
    """V⁻¹TV = D with V built from the eigenspace bases of the Riesz projections."""
    T = as_square(T)
    n = T.shape[0]
    cert = certificate or certify(T, gap, nodes, tol, pivot_tol, rank_tol)
    if cert.verdict != DECOMPOSABLE:
        raise NotDecomposableError(
            "operator is not decomposable; no diagonalizing similarity exists",
            residuals=cert.residuals(),
        )
    bases = [eigenspace(p, rank_tol) for p in cert.bundle.projections]
    dims = tuple(b.rank for b in bases)
    if sum(dims) != n:
        raise NotDecomposableError(
            f"eigenspace dimensions {dims} do not add up to {n}", dims=list(dims)
        )
    V = np.hstack([b.columns for b in bases])
    diagonal = np.concatenate(
        [np.full(b.rank, p.value, dtype=np.complex128) for b, p in zip(bases, cert.bundle.projections)]
    )
    D = np.diag(diagonal)
    V_inv = inverse(V, pivot_tol)
    return SimilarityPair(
        V=V,
        D=D,
        residual=norm_fro(V_inv @ T @ V - D),
        cond_estimate=norm_op2_est(V) * norm_op2_est(V_inv),
        dims=dims,
    )


def spawn_seeds(seed: int, count: int) -> List[int]:
    """Independent 64-bit child seeds for parallel or sharded generation."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def _unimodular(values: Sequence[complex]) -> np.ndarray:
    z = np.asarray(values, dtype=np.complex128).ravel()
    if np.any(z == 0) or not np.all(np.isfinite(z)):
        raise ValueError("planted values must be finite and nonzero")
    return z / np.abs(z)


def random_similarity(
    n: int, rng: np.random.Generator, cond_cap: float, max_resamples: int = MAX_RESAMPLES
) -> Tuple[np.ndarray, np.ndarray, float]:
    """Complex standard normal V, resampled until κ(V) <= cond_cap."""
    if cond_cap < 1:
        raise ValueError("cond_cap must be >= 1")
    best = np.inf
    for _ in range(max_resamples):
        V = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
        try:
            V_inv = inverse(V)
        except SingularMatrixError:
            continue
        cond = norm_op2_est(V) * norm_op2_est(V_inv)
        best = min(best, cond)
        if cond <= cond_cap:
            return V, V_inv, cond
    raise GenerationError(
        f"no similarity with condition <= {cond_cap} after {max_resamples} resamples (best {best:.3e})",
        attempts=max_resamples,
        cond_cap=cond_cap,
    )


def gen_power_bounded(
    n: int,
    values: Sequence[complex],
    multiplicities: Optional[Sequence[int]] = None,
    cond_cap: float = 100.0,
    seed: Optional[int] = 0,
    V=None,
) -> Tuple[np.ndarray, GroundTruth]:
    """T = V·D·V⁻¹ with D diagonal unimodular.

    Without `multiplicities`, `values` is the full diagonal (length n). When
    every planted value is the same, T is returned as exactly λI.
    """
    if multiplicities is None:
        diagonal = _unimodular(values)
    else:
        if len(multiplicities) != len(values) or any(m < 1 for m in multiplicities):
            raise ValueError("multiplicities must be positive and match values")
        diagonal = np.repeat(_unimodular(values), multiplicities)
    if diagonal.size != n:
        raise ValueError(f"multiplicities add up to {diagonal.size}, expected {n}")

    if V is None:
        rng = np.random.Generator(np.random.Philox(seed))
        V, V_inv, cond = random_similarity(n, rng, cond_cap)
    else:
        V = as_square(V, "V")
        V_inv = inverse(V)
        cond = norm_op2_est(V) * norm_op2_est(V_inv)

    distinct: List[complex] = []
    for d in diagonal:
        if complex(d) not in distinct:
            distinct.append(complex(d))

    if len(distinct) == 1:
        T = distinct[0] * identity(n)
    else:
        T = V @ np.diag(diagonal) @ V_inv

    projections = [V @ np.diag((diagonal == d).astype(complex)) @ V_inv for d in distinct]
    truth = GroundTruth(
        V=V,
        V_inv=V_inv,
        diagonal=diagonal,
        values=distinct,
        multiplicities=[int(np.sum(diagonal == d)) for d in distinct],
        projections=projections,
        cond=cond,
        seed=seed,
    )
    return T, truth


def gen_defective(
    n: int,
    value: complex,
    seed: Optional[int] = None,
    cond_cap: float = 100.0,
    V=None,
) -> np.ndarray:
    """V·J·V⁻¹ for a single n×n Jordan block J at a unimodular value.

    With neither `seed` nor `V`, the block itself is returned.
    """
    if n < 2:
        raise ValueError("a defective operator needs n >= 2")
    lam = complex(_unimodular([value])[0])
    J = lam * identity(n) + np.diag(np.ones(n - 1, dtype=np.complex128), 1)
    if V is None and seed is None:
        return J
    if V is None:
        rng = np.random.Generator(np.random.Philox(seed))
        V, V_inv, _ = random_similarity(n, rng, cond_cap)
    else:
        V = as_square(V, "V")
        V_inv = inverse(V)
    return V @ J @ V_inv
