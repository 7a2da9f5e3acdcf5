"""
Eigenvalues of dense complex matrices, isolated clusters, unimodularity.

Eigenvalues come from Householder reduction to Hessenberg form followed by
complex single-shift QR (Wilkinson shift, Givens rotations, deflation).
"""

from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from spectral.complexmat import EPS, as_square, norm_fro
from spectral.config import default_gap
from spectral.errors import ConvergenceError

TWO_PI = 2 * np.pi


@dataclass(frozen=True, eq=False)
class Cluster:
    center: complex
    members: np.ndarray
    indices: Tuple[int, ...]
    multiplicity: int
    separation: float
    spread: float


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    clusters: List[Cluster]
    gap: float


def spectral_order_key(z: complex) -> Tuple[float, float]:
    """Order by argument in [0, 2π), then modulus."""
    angle = float(np.angle(z)) % TWO_PI
    if angle > TWO_PI - 1e-12:
        angle = 0.0
    return round(angle, 12), round(abs(z), 12)


def hessenberg(A) -> np.ndarray:
    """Upper Hessenberg form by Householder reflections (unitary similarity)."""
    H = as_square(A).copy()
    n = H.shape[0]
    for k in range(n - 2):
        x = H[k + 1:, k]
        if not np.any(x[1:]):
            continue
        x_norm = np.linalg.norm(x)
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * x_norm
        v /= np.linalg.norm(v)
        H[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, k:])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0.0
    return H


def _eig2x2(B: np.ndarray) -> Tuple[complex, complex]:
    a, b, c, d = B[0, 0], B[0, 1], B[1, 0], B[1, 1]
    p = (a - d) / 2
    bc = b * c
    disc = np.sqrt(complex(p * p + bc))
    if abs(p + disc) < abs(p - disc):
        disc = -disc
    denom = p + disc
    if denom == 0:
        mid = (a + d) / 2
        return complex(mid), complex(mid)
    return complex(a + bc / denom), complex(d - bc / denom)


def _wilkinson_shift(H: np.ndarray, hi: int) -> complex:
    l1, l2 = _eig2x2(H[hi - 1:hi + 1, hi - 1:hi + 1])
    d = H[hi, hi]
    return l1 if abs(l1 - d) <= abs(l2 - d) else l2


def _qr_step(H: np.ndarray, lo: int, hi: int, mu: complex) -> None:
    """One shifted QR step, in place, on the active block H[lo:hi+1, lo:hi+1]."""
    B = H[lo:hi + 1, lo:hi + 1]
    m = B.shape[0]
    diag = np.arange(m)
    B[diag, diag] -= mu
    rotations = []
    for k in range(m - 1):
        x, y = B[k, k], B[k + 1, k]
        r = np.hypot(abs(x), abs(y))
        if r == 0.0:
            c, s = 1.0 + 0j, 0j
        else:
            c, s = x / r, y / r
        G = np.array([[np.conj(c), np.conj(s)], [-s, c]])
        B[k:k + 2, k:] = G @ B[k:k + 2, k:]
        B[k + 1, k] = 0.0
        rotations.append(G)
    for k, G in enumerate(rotations):
        B[:k + 2, k:k + 2] = B[:k + 2, k:k + 2] @ G.conj().T
    B[diag, diag] += mu


def eigenvalues(A, max_sweeps: Optional[int] = None) -> np.ndarray:
    """All n eigenvalues (with algebraic multiplicity) in deflation order."""
    H = hessenberg(A)
    n = H.shape[0]
    if max_sweeps is None:
        max_sweeps = 30 * n
    h_norm = norm_fro(H)
    found: List[complex] = []
    hi = n - 1
    sweeps = 0
    since_deflation = 0

    while hi >= 0:
        if hi == 0:
            found.append(complex(H[0, 0]))
            break

        lo = hi
        while lo > 0:
            scale = abs(H[lo - 1, lo - 1]) + abs(H[lo, lo])
            if scale == 0.0:
                scale = h_norm
            if abs(H[lo, lo - 1]) <= EPS * scale:
                H[lo, lo - 1] = 0.0
                break
            lo -= 1

        if lo == hi:
            found.append(complex(H[hi, hi]))
            hi -= 1
            since_deflation = 0
            continue
        if lo == hi - 1:
            found.extend(_eig2x2(H[lo:hi + 1, lo:hi + 1]))
            hi -= 2
            since_deflation = 0
            continue

        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"QR iteration did not converge on block [{lo}, {hi}] after {sweeps} sweeps",
                block=(lo, hi),
                sweeps=sweeps,
            )
        sweeps += 1
        since_deflation += 1
        if since_deflation % 11 == 0:
            # exceptional shift breaks symmetric cycling
            mu = H[hi, hi] + 0.75j * abs(H[hi, hi - 1])
        else:
            mu = _wilkinson_shift(H, hi)
        _qr_step(H, lo, hi, mu)

    return np.array(found, dtype=np.complex128)


def cluster(eigs: Sequence[complex], gap: float) -> List[Cluster]:
    """Single-linkage grouping: chains of pairwise distances < gap."""
    if gap <= 0:
        raise ValueError("gap must be positive")
    z = np.asarray(eigs, dtype=np.complex128).ravel()
    n = z.size
    linked = np.abs(z[:, None] - z[None, :]) < gap
    label = np.full(n, -1)
    groups = []
    for start in range(n):
        if label[start] >= 0:
            continue
        label[start] = len(groups)
        members = [start]
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j in np.flatnonzero(linked[i] & (label < 0)):
                label[j] = label[start]
                members.append(int(j))
                queue.append(int(j))
        groups.append(sorted(members))

    clusters = []
    for idx in groups:
        members = z[idx]
        center = complex(members.mean())
        outside = np.delete(z, idx)
        separation = float(np.min(np.abs(outside - center))) if outside.size else float("inf")
        clusters.append(
            Cluster(
                center=center,
                members=members,
                indices=tuple(idx),
                multiplicity=len(idx),
                separation=separation,
                spread=float(np.max(np.abs(members - center))),
            )
        )
    clusters.sort(key=lambda c: spectral_order_key(c.center))
    return clusters


def spectrum_report(A, gap: Optional[float] = None, max_sweeps: Optional[int] = None) -> SpectrumReport:
    A = as_square(A)
    if gap is None:
        gap = default_gap(norm_fro(A))
    eigs = eigenvalues(A, max_sweeps)
    return SpectrumReport(eigenvalues=eigs, clusters=cluster(eigs, gap), gap=gap)


def unimodularity_check(
    report: Union[SpectrumReport, Sequence[complex]], tol: float = 1e-8
) -> Tuple[bool, float]:
    """max_j | |λ_j| - 1 | and whether it is within tol."""
    eigs = report.eigenvalues if isinstance(report, SpectrumReport) else report
    z = np.asarray(eigs, dtype=np.complex128).ravel()
    deviation = float(np.max(np.abs(np.abs(z) - 1.0))) if z.size else 0.0
    return deviation <= tol, deviation
