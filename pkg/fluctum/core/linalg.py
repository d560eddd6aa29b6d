"""
Dense complex linear algebra for small Hermitian operators.

Matrices are plain complex128 numpy arrays. Tensor products use the
convention row = a * dim_b + b (first factor slow) everywhere.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple, Union

import numpy as np
import numpy.typing as npt

from fluctum.config.settings import settings
from fluctum.utils.error_handling import (
    ConvergenceError,
    DimensionMismatchError,
    InvalidParameterError,
    NotPositiveError,
)
from fluctum.utils.input_validation import InputValidator

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]
RealVector = npt.NDArray[np.float64]


class Subsystem(str, Enum):
    """Factor kept by partial_trace"""
    A = "A"
    B = "B"


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Ascending eigenvalues and the unitary whose column j pairs with eigenvalue j."""

    eigenvalues: RealVector
    eigenvectors: ComplexMatrix

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def vector(self, j: int) -> np.ndarray:
        return self.eigenvectors[:, j]

    def projector(self, j: int) -> ComplexMatrix:
        v = self.eigenvectors[:, j]
        return np.outer(v, v.conj())

    def apply(self, f: Callable[[RealVector], RealVector]) -> ComplexMatrix:
        """V diag(f(eigenvalues)) V^dagger"""
        values = np.asarray(f(self.eigenvalues), dtype=np.complex128)
        return (self.eigenvectors * values) @ self.eigenvectors.conj().T

    def reconstruct(self) -> ComplexMatrix:
        return self.apply(lambda x: x)


def dagger(A: ComplexMatrix) -> ComplexMatrix:
    return np.asarray(A).conj().T


def identity(dim: int) -> ComplexMatrix:
    return np.eye(dim, dtype=np.complex128)


def hermiticity_defect(A: ComplexMatrix) -> float:
    A = np.asarray(A)
    return float(np.linalg.norm(A - A.conj().T))


def is_hermitian(A: ComplexMatrix, tol: Optional[float] = None) -> bool:
    tol = settings.tolerances.validation if tol is None else tol
    A = np.asarray(A)
    return A.ndim == 2 and A.shape[0] == A.shape[1] and hermiticity_defect(A) <= tol * max(1.0, float(np.linalg.norm(A)))


def allclose(A: ComplexMatrix, B: ComplexMatrix, atol: float) -> bool:
    """Elementwise comparison with an explicit absolute tolerance."""
    A, B = np.asarray(A), np.asarray(B)
    return A.shape == B.shape and bool(np.all(np.abs(A - B) <= atol))


def hs_inner(A: ComplexMatrix, B: ComplexMatrix) -> complex:
    """Hilbert-Schmidt inner product Tr(A^dagger B)."""
    A = InputValidator.matrix(A, "A")
    B = InputValidator.matrix(B, "B")
    InputValidator.same_shape(A, B, "hs_inner operands")
    return complex(np.vdot(A, B))


def _jacobi_rotate(A: np.ndarray, V: np.ndarray, p: int, q: int) -> None:
    """Annihilate A[p, q] in place with a complex Jacobi rotation, accumulating into V."""
    apq = A[p, q]
    r = abs(apq)
    phase = apq / r
    app, aqq = A[p, p].real, A[q, q].real

    theta = (aqq - app) / (2.0 * r)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    # G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
    g00, g01 = c, s
    g10, g11 = -s * phase.conjugate(), c * phase.conjugate()

    col_p, col_q = A[:, p].copy(), A[:, q].copy()
    A[:, p] = col_p * g00 + col_q * g10
    A[:, q] = col_p * g01 + col_q * g11
    row_p, row_q = A[p, :].copy(), A[q, :].copy()
    A[p, :] = np.conj(g00) * row_p + np.conj(g10) * row_q
    A[q, :] = np.conj(g01) * row_p + np.conj(g11) * row_q
    A[p, q] = A[q, p] = 0.0
    A[p, p] = app - t * r
    A[q, q] = aqq + t * r

    v_p, v_q = V[:, p].copy(), V[:, q].copy()
    V[:, p] = v_p * g00 + v_q * g10
    V[:, q] = v_p * g01 + v_q * g11


def _fix_phases(V: np.ndarray) -> np.ndarray:
    """Make the largest-modulus component of every column real positive."""
    pivots = np.argmax(np.abs(V), axis=0)
    lead = V[pivots, np.arange(V.shape[1])]
    return V * (np.abs(lead) / lead)


def eigh(H: ComplexMatrix) -> EigenSystem:
    """
    Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Converges when the off-diagonal Frobenius mass drops below
    tolerances.jacobi_convergence * ||H||_2; raises ConvergenceError after
    settings.jacobi_max_sweeps sweeps, or when V diag(lambda) V^dagger misses H
    by more than tolerances.reconstruction * max(1, ||H||_2).
    """
    H = InputValidator.hermitian(H, "H")
    n = H.shape[0]
    A = 0.5 * (H + H.conj().T)
    V = np.eye(n, dtype=np.complex128)
    threshold = settings.tolerances.jacobi_convergence * float(np.linalg.norm(A))

    for sweep in range(settings.jacobi_max_sweeps + 1):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= threshold:
            break
        if sweep == settings.jacobi_max_sweeps:
            raise ConvergenceError(
                f"Jacobi eigensolver did not converge in {sweep} sweeps (off-diagonal mass {off:.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                if A[p, q] != 0.0:
                    _jacobi_rotate(A, V, p, q)

    eigenvalues = np.real(np.diag(A)).copy()
    order = np.argsort(eigenvalues, kind="stable")
    spectrum = EigenSystem(eigenvalues=eigenvalues[order], eigenvectors=_fix_phases(V[:, order]))

    scale = max(1.0, float(np.linalg.norm(H)))
    residual = float(np.linalg.norm(spectrum.reconstruct() - 0.5 * (H + H.conj().T)))
    if residual > settings.tolerances.reconstruction * scale:
        raise ConvergenceError(
            f"Jacobi eigensolver reconstruction residual {residual:.3e} exceeds tolerance",
            data={"residual": residual},
        )
    return spectrum


def func_hermitian(H: ComplexMatrix, f: Callable[[RealVector], RealVector]) -> ComplexMatrix:
    """f(H) = V diag(f(lambda)) V^dagger; f must act elementwise on a numpy array."""
    return eigh(H).apply(f)


def positive_sqrt(A: ComplexMatrix) -> ComplexMatrix:
    """Unique positive square root; eigenvalues down to -tolerance are clipped to zero."""
    spectrum = eigh(A)
    lowest = float(spectrum.eigenvalues[0])
    if lowest < -settings.tolerances.validation:
        raise NotPositiveError(f"Matrix is not positive semidefinite (min eigenvalue {lowest:.3e})")
    return spectrum.apply(lambda x: np.sqrt(np.clip(x, 0.0, None)))


def singular_values(A: ComplexMatrix) -> RealVector:
    """Eigenvalues of |A| = sqrt(A^dagger A), ascending, with multiplicity."""
    A = InputValidator.square(A, "A")
    if is_hermitian(A, settings.tolerances.equality):
        return np.sort(np.abs(eigh(A).eigenvalues))
    gram = A.conj().T @ A
    return np.sqrt(np.clip(eigh(gram).eigenvalues, 0.0, None))


def schatten_norm(A: ComplexMatrix, p: float) -> float:
    """Schatten p-norm for p in [1, inf]."""
    if not p >= 1:
        raise InvalidParameterError(f"Schatten norm needs p >= 1, got {p}")
    s = singular_values(A)
    if math.isinf(p):
        return float(s.max())
    scale = float(s.max())
    if scale == 0.0:
        return 0.0
    return scale * float(np.sum((s / scale) ** p) ** (1.0 / p))


def norm_interpolation_check(A: ComplexMatrix) -> Tuple[float, float]:
    """(||A||_2^2, ||A||_inf * ||A||_1); the first never exceeds the second."""
    s = singular_values(A)
    return float(np.sum(s ** 2)), float(s.max() * s.sum())


def kron(A: ComplexMatrix, B: ComplexMatrix) -> ComplexMatrix:
    return np.kron(InputValidator.matrix(A, "A"), InputValidator.matrix(B, "B"))


def partial_trace(M: ComplexMatrix, dim_a: int, dim_b: int, keep: Union[Subsystem, str]) -> ComplexMatrix:
    """Reduced matrix over the kept factor of a (dim_a*dim_b)-square operator."""
    M = InputValidator.square(M, "M")
    if M.shape[0] != dim_a * dim_b:
        raise DimensionMismatchError(f"Operator of size {M.shape[0]} does not factor as {dim_a}x{dim_b}")
    blocks = M.reshape(dim_a, dim_b, dim_a, dim_b)
    if Subsystem(keep) is Subsystem.A:
        return np.trace(blocks, axis1=1, axis2=3)
    return np.trace(blocks, axis1=0, axis2=2)


def maximally_entangled_state(dim: int) -> np.ndarray:
    """|phi_+> = sum_n |n>|n> / sqrt(N)"""
    psi = np.zeros(dim * dim, dtype=np.complex128)
    psi[np.arange(dim) * (dim + 1)] = 1.0 / math.sqrt(dim)
    return psi
