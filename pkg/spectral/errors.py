"""
Exception hierarchy for the spectral toolkit.

Every error carries the structured fields the CLI writes to the error stream.
"""

from typing import Any, Dict

import numpy as np


class SpectralError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str, **fields: Any):
        super().__init__(message)
        self.message = message
        self.fields = fields

    def details(self) -> Dict[str, Any]:
        """Error object as written to the error stream."""
        payload = {"type": type(self).__name__, "message": self.message}
        payload.update(self.fields)
        return payload


class InvalidMatrixError(SpectralError, ValueError):
    pass


class DimensionError(InvalidMatrixError):
    pass


class SingularMatrixError(SpectralError, np.linalg.LinAlgError):
    """Pivot fell below pivot_tol·‖A‖_∞ at elimination stage `stage`."""

    def __init__(self, message: str, stage: int, pivot: float, threshold: float):
        super().__init__(message, stage=stage, pivot=pivot, threshold=threshold)
        self.stage = stage


class ConvergenceError(SpectralError, np.linalg.LinAlgError):
    def __init__(self, message: str, block, sweeps: int):
        super().__init__(message, block=list(block), sweeps=sweeps)
        self.block = tuple(block)


class ContourError(SpectralError):
    """A quadrature node touches the spectrum."""

    def __init__(self, message: str, w: complex):
        super().__init__(message, w=[float(np.real(w)), float(np.imag(w))])
        self.w = complex(w)


class ClusterSeparationError(SpectralError):
    pass


class CoincidentValuesError(SpectralError, ValueError):
    pass


class MultipleClustersError(SpectralError):
    pass


class NotInvertibleError(SpectralError):
    pass


class NotDecomposableError(SpectralError):
    pass


class GenerationError(SpectralError):
    pass


class MatrixFileError(SpectralError, ValueError):
    """Parse failure; `line` is 1-based, `field` names the offending entry."""

    def __init__(self, message: str, path=None, line=None, field=None):
        super().__init__(message, path=None if path is None else str(path), line=line, field=field)
        self.line = line
        self.field = field
