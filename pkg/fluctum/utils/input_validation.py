import logging
from typing import Any, Optional

import numpy as np

from fluctum.config.settings import settings
from fluctum.utils.error_handling import (
    DimensionMismatchError,
    InvalidInputError,
    InvalidParameterError,
)

logger = logging.getLogger(__name__)


class InputValidator:
    """Validation shared by every numerical operation. Each check raises a typed FluctumError."""

    @classmethod
    def matrix(cls, value: Any, name: str = "matrix") -> np.ndarray:
        """Coerce to a 2-D complex128 array."""
        array = np.asarray(value, dtype=np.complex128)
        if array.ndim != 2 or 0 in array.shape:
            raise DimensionMismatchError(f"{name} must be a non-empty 2-D array, got shape {array.shape}")
        return array

    @classmethod
    def square(cls, value: Any, name: str = "matrix") -> np.ndarray:
        array = cls.matrix(value, name)
        if array.shape[0] != array.shape[1]:
            raise DimensionMismatchError(f"{name} must be square, got shape {array.shape}")
        return array

    @classmethod
    def same_shape(cls, first: np.ndarray, second: np.ndarray, names: str = "operands") -> None:
        if first.shape != second.shape:
            raise DimensionMismatchError(f"{names} have different shapes {first.shape} and {second.shape}")

    @classmethod
    def dimension(cls, value: Any, expected: int, name: str = "matrix") -> np.ndarray:
        array = cls.square(value, name)
        if array.shape[0] != expected:
            raise DimensionMismatchError(f"{name} must be {expected}x{expected}, got {array.shape}")
        return array

    @classmethod
    def hermitian(cls, value: Any, name: str = "matrix", tol: Optional[float] = None) -> np.ndarray:
        """Square and Hermitian within a tolerance relative to the Hilbert-Schmidt norm."""
        array = cls.square(value, name)
        tol = settings.tolerances.validation if tol is None else tol
        defect = np.linalg.norm(array - array.conj().T)
        scale = max(1.0, float(np.linalg.norm(array)))
        if defect > tol * scale:
            raise InvalidInputError(f"{name} is not Hermitian (defect {defect:.3e})", data={"defect": defect})
        return array

    @classmethod
    def unitary(cls, value: Any, name: str = "U", tol: Optional[float] = None) -> np.ndarray:
        array = cls.square(value, name)
        tol = settings.tolerances.validation if tol is None else tol
        defect = np.linalg.norm(array.conj().T @ array - np.eye(array.shape[0]))
        if defect > tol:
            raise InvalidInputError(f"{name} is not unitary (defect {defect:.3e})", data={"defect": defect})
        return array

    @classmethod
    def unit_vector(cls, value: Any, name: str = "psi", tol: Optional[float] = None) -> np.ndarray:
        vector = np.asarray(value, dtype=np.complex128).reshape(-1)
        if vector.size == 0:
            raise DimensionMismatchError(f"{name} must not be empty")
        tol = settings.tolerances.equality if tol is None else tol
        norm = float(np.linalg.norm(vector))
        if abs(norm - 1.0) > tol:
            raise InvalidInputError(f"{name} is not a unit vector (norm {norm!r})")
        return vector

    @classmethod
    def probability_vector(cls, value: Any, length: int, name: str = "p_a", tol: Optional[float] = None) -> np.ndarray:
        vector = np.asarray(value, dtype=float).reshape(-1)
        if vector.size != length:
            raise DimensionMismatchError(f"{name} must have length {length}, got {vector.size}")
        tol = settings.tolerances.validation if tol is None else tol
        if np.any(~np.isfinite(vector)) or vector.min() < -tol:
            raise InvalidInputError(f"{name} has negative or non-finite entries")
        total = float(vector.sum())
        if abs(total - 1.0) > tol:
            raise InvalidInputError(f"{name} sums to {total!r}, not 1")
        return vector

    @classmethod
    def in_range(cls, value: float, low: float, high: float, name: str) -> float:
        value = float(value)
        if not np.isfinite(value) or value < low or value > high:
            raise InvalidParameterError(f"{name}={value!r} is outside [{low}, {high}]")
        return value

    @classmethod
    def beta(cls, value: float, name: str = "beta") -> float:
        """Inverse temperature in [0, beta_max]."""
        return cls.in_range(value, 0.0, settings.beta_max, name)
