"""
Generalized Gell-Mann generators of SU(N) and Bloch vectors.

Normalization Tr(l_i l_j) = 2 delta_ij, so X = 1/2 sum_j tau_j l_j with
tau_j = Tr(X l_j). Generator order: symmetric pairs (j<k, lexicographic),
antisymmetric pairs in the same order, then diagonal matrices l = 1..N-1.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from fluctum.config.settings import settings
from fluctum.core.linalg import ComplexMatrix
from fluctum.utils.error_handling import DimensionMismatchError, InvalidInputError, InvalidParameterError
from fluctum.utils.input_validation import InputValidator

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GeneratorBasis:
    dim: int
    generators: Tuple[ComplexMatrix, ...]

    def __len__(self) -> int:
        return len(self.generators)

    def stacked(self) -> np.ndarray:
        """Generators as one (N^2-1, N, N) array."""
        return np.stack(self.generators)


@dataclass(frozen=True, eq=False)
class BlochVector:
    components: np.ndarray
    dim: int

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))

    def to_list(self) -> List[float]:
        return [float(c) for c in self.components]


@lru_cache(maxsize=32)
def _generators(dim: int) -> Tuple[ComplexMatrix, ...]:
    pairs = [(j, k) for j in range(dim) for k in range(j + 1, dim)]
    symmetric, antisymmetric, diagonal = [], [], []
    for j, k in pairs:
        S = np.zeros((dim, dim), dtype=np.complex128)
        S[j, k] = S[k, j] = 1.0
        symmetric.append(S)
        A = np.zeros((dim, dim), dtype=np.complex128)
        A[j, k] = -1j
        A[k, j] = 1j
        antisymmetric.append(A)
    for level in range(1, dim):
        entries = np.zeros(dim)
        entries[:level] = 1.0
        entries[level] = -level
        diagonal.append(np.diag(math.sqrt(2.0 / (level * (level + 1))) * entries).astype(np.complex128))
    generators = tuple(symmetric + antisymmetric + diagonal)
    for g in generators:
        g.setflags(write=False)
    return generators


def su_generators(dim: int) -> GeneratorBasis:
    """The N^2-1 generalized Gell-Mann matrices; N=2 gives the Pauli matrices."""
    if int(dim) != dim or dim < 2:
        raise InvalidParameterError(f"SU(N) generators need N >= 2, got {dim}")
    return GeneratorBasis(dim=int(dim), generators=_generators(int(dim)))


def to_bloch(X: ComplexMatrix) -> BlochVector:
    X = InputValidator.hermitian(X, "X")
    trace = np.trace(X)
    if abs(trace) >= settings.tolerances.validation:
        raise InvalidInputError(f"Bloch representation needs a traceless operator, trace is {trace:.3e}")
    basis = su_generators(X.shape[0]).stacked()
    # Tr(X l_j) = sum_ab X_ab (l_j)_ba
    tau = np.real(np.einsum("ab,jba->j", X, basis))
    return BlochVector(components=tau, dim=X.shape[0])


def from_bloch(tau: BlochVector) -> ComplexMatrix:
    components = np.asarray(tau.components, dtype=float).reshape(-1)
    if components.size != tau.dim ** 2 - 1:
        raise DimensionMismatchError(
            f"Bloch vector for N={tau.dim} needs {tau.dim ** 2 - 1} components, got {components.size}"
        )
    basis = su_generators(tau.dim).stacked()
    return 0.5 * np.einsum("j,jab->ab", components, basis)


def bloch_vector(components, dim: int) -> BlochVector:
    return BlochVector(components=np.asarray(components, dtype=float).reshape(-1), dim=dim)
