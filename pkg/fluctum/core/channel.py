"""
Quantum channels in operator-sum (Kraus) form and their Choi matrices.

The Kraus list is the source of truth; the Choi representation is derived
on first access and cached on the instance. Choi index convention: the
output system is the first (slow) factor, the reference copy the second.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from fluctum.config.settings import settings
from fluctum.core.linalg import (
    ComplexMatrix,
    Subsystem,
    eigh,
    identity,
    partial_trace,
    schatten_norm,
)
from fluctum.core.sampling import complex_gaussian, make_rng, perturb_seed
from fluctum.utils.error_handling import (
    ConstraintViolationError,
    ConvergenceError,
    DimensionMismatchError,
    InvalidInputError,
    InvalidParameterError,
)
from fluctum.utils.input_validation import InputValidator

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Rescaled dynamical matrix eta of an N -> N map; D = N * eta."""

    dim: int
    eta: ComplexMatrix

    @property
    def D(self) -> ComplexMatrix:
        return self.dim * self.eta

    @property
    def trace(self) -> float:
        return float(np.trace(self.eta).real)

    def output_marginal(self) -> ComplexMatrix:
        """Tr_R(eta), which equals Phi(rho_*) for the encoded map."""
        return partial_trace(self.eta, self.dim, self.dim, Subsystem.A)

    def input_marginal(self) -> ComplexMatrix:
        """Tr_A(D); the identity for trace-preserving maps."""
        return partial_trace(self.D, self.dim, self.dim, Subsystem.B)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """
    Linear map A -> sum_n K_n A K_n^dagger with K_n of shape (dim_out, dim_in).

    raw=True skips the trace-preservation check; such objects exist to build
    counterexamples for the bound checks and are flagged in their repr.
    """

    kraus: Tuple[ComplexMatrix, ...]
    raw: bool = False
    name: str = "channel"

    def __post_init__(self):
        if len(self.kraus) == 0:
            raise InvalidInputError("A channel needs at least one Kraus operator")
        ops = tuple(InputValidator.matrix(K, f"kraus[{i}]").copy() for i, K in enumerate(self.kraus))
        shape = ops[0].shape
        for i, K in enumerate(ops):
            if K.shape != shape:
                raise DimensionMismatchError(f"kraus[{i}] has shape {K.shape}, expected {shape}")
            K.setflags(write=False)
        object.__setattr__(self, "kraus", ops)

        if not self.raw:
            ok, defect = is_trace_preserving(self)
            if not ok:
                raise ConstraintViolationError(
                    f"Kraus operators of '{self.name}' are not trace preserving (defect {defect:.3e})",
                    data={"defect": defect},
                )

    def __repr__(self) -> str:
        flag = ", raw" if self.raw else ""
        return f"QuantumChannel({self.name!r}, {self.dim_in}->{self.dim_out}, {len(self.kraus)} Kraus{flag})"

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def is_square(self) -> bool:
        return self.dim_in == self.dim_out

    @cached_property
    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus)

    @cached_property
    def choi_matrix(self) -> ChoiMatrix:
        # concurrent first access may compute twice; both results are identical
        return choi(self)

    def __call__(self, A: ComplexMatrix) -> ComplexMatrix:
        return apply(self, A)


def apply(phi: QuantumChannel, A: ComplexMatrix) -> ComplexMatrix:
    """sum_n K_n A K_n^dagger"""
    A = InputValidator.dimension(A, phi.dim_in, "A")
    K = phi.stacked
    return np.einsum("nab,bc,ndc->ad", K, A, K.conj())


def adjoint_apply(phi: QuantumChannel, B: ComplexMatrix) -> ComplexMatrix:
    """sum_n K_n^dagger B K_n"""
    B = InputValidator.dimension(B, phi.dim_out, "B")
    K = phi.stacked
    return np.einsum("nba,bc,ncd->ad", K.conj(), B, K)


def is_trace_preserving(phi: QuantumChannel) -> Tuple[bool, float]:
    K = phi.stacked
    completeness = np.einsum("nba,nbc->ac", K.conj(), K)
    defect = float(np.linalg.norm(completeness - identity(phi.dim_in)))
    return defect <= settings.tolerances.validation, defect


def is_unital(phi: QuantumChannel) -> Tuple[bool, float]:
    """(defect < tolerance, ||Phi(I) - I||_2)"""
    if not phi.is_square:
        return False, math.inf
    defect = float(np.linalg.norm(apply(phi, identity(phi.dim_in)) - identity(phi.dim_out)))
    return defect < settings.tolerances.validation, defect


def choi(phi: QuantumChannel) -> ChoiMatrix:
    """eta = (Phi x id)(|phi_+><phi_+|) = sum_n vec(K_n) vec(K_n)^dagger / N."""
    if not phi.is_square:
        raise DimensionMismatchError(
            f"Choi matrix is only supported for square channels, got {phi.dim_in}->{phi.dim_out}"
        )
    n = phi.dim_in
    # (K x I)|phi_+> has entry K[a, r] / sqrt(N) at row a*N + r
    W = phi.stacked.reshape(len(phi.kraus), n * n)
    eta = np.einsum("ki,kj->ij", W, W.conj()) / n
    return ChoiMatrix(dim=n, eta=eta)


def choi_from_action(action: Callable[[ComplexMatrix], ComplexMatrix], dim: int) -> ChoiMatrix:
    """Choi matrix of any linear map on N x N matrices: D = sum_ij action(E_ij) x E_ij."""
    D = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for i in range(dim):
        for j in range(dim):
            E = np.zeros((dim, dim), dtype=np.complex128)
            E[i, j] = 1.0
            image = InputValidator.dimension(action(E), dim, "action(E_ij)")
            D += np.kron(image, E)
    return ChoiMatrix(dim=dim, eta=D / dim)


def apply_via_choi(choi_matrix: ChoiMatrix, X: ComplexMatrix) -> ComplexMatrix:
    """Phi(X) = Tr_R(D (I x X^T))"""
    n = choi_matrix.dim
    X = InputValidator.dimension(X, n, "X")
    product = choi_matrix.D @ np.kron(identity(n), X.T)
    return partial_trace(product, n, n, Subsystem.A)


def is_completely_positive(choi_matrix: ChoiMatrix) -> Tuple[bool, float]:
    """(min_eig >= -tolerance, smallest eigenvalue of D)"""
    min_eig = float(eigh(choi_matrix.D).eigenvalues[0])
    return min_eig >= -settings.tolerances.validation, min_eig


def map_norm(phi: QuantumChannel) -> float:
    """||Phi|| = ||Phi(I)||_inf, valid because every Kraus-form map is positive."""
    return schatten_norm(apply(phi, identity(phi.dim_in)), math.inf)


def compose_unitary(phi: QuantumChannel, U: ComplexMatrix, name: Optional[str] = None) -> QuantumChannel:
    """Channel with Kraus operators U K_n (the map followed by conjugation with U)."""
    U = InputValidator.unitary(InputValidator.dimension(U, phi.dim_out, "U"), "U")
    return QuantumChannel(tuple(U @ K for K in phi.kraus), raw=phi.raw, name=name or f"U*{phi.name}")


def identity_channel(dim: int) -> QuantumChannel:
    return QuantumChannel((identity(dim),), name=f"identity[{dim}]")


def unitary_channel(U: ComplexMatrix, name: str = "unitary") -> QuantumChannel:
    U = InputValidator.unitary(U, "U")
    return QuantumChannel((U,), name=name)


def mixture_channel(weights: Sequence[float], unitaries: Sequence[ComplexMatrix], name: str = "mixture") -> QuantumChannel:
    """sum_k w_k U_k A U_k^dagger; bistochastic."""
    weights = InputValidator.probability_vector(weights, len(unitaries), "weights")
    kraus = tuple(math.sqrt(max(w, 0.0)) * InputValidator.unitary(U, f"U[{k}]") for k, (w, U) in enumerate(zip(weights, unitaries)))
    return QuantumChannel(kraus, name=name)


def random_channel(dim: int, n_kraus: int, seed: int) -> QuantumChannel:
    """
    Seeded random channel: K_n = G_n S^{-1/2} with S = sum_n G_n^dagger G_n and
    complex Gaussian G_n.

    A numerically singular S triggers a retry with a perturbed seed; after
    settings.random_channel_retries retries a ConvergenceError is raised.
    """
    if dim < 1 or n_kraus < 1:
        raise InvalidParameterError(f"random_channel needs dim >= 1 and n_kraus >= 1, got {dim}, {n_kraus}")

    for attempt in range(settings.random_channel_retries + 1):
        rng = make_rng(perturb_seed(seed, attempt), dim, n_kraus)
        G = complex_gaussian((n_kraus, dim, dim), rng)
        S = np.einsum("nba,nbc->ac", G.conj(), G)
        spectrum = eigh(S)
        if spectrum.eigenvalues[0] <= settings.tolerances.validation * spectrum.eigenvalues[-1]:
            logger.warning("Singular normalization for seed %d (attempt %d), retrying", seed, attempt)
            continue
        inv_sqrt = spectrum.apply(lambda x: 1.0 / np.sqrt(x))
        return QuantumChannel(tuple(G_n @ inv_sqrt for G_n in G), name=f"random[{dim},{n_kraus},{seed}]")

    raise ConvergenceError(
        f"random_channel(dim={dim}, n_kraus={n_kraus}, seed={seed}) hit a singular normalization "
        f"{settings.random_channel_retries + 1} times"
    )


def nonunital_part(phi: QuantumChannel) -> ComplexMatrix:
    """Phi(I) - I for a square channel."""
    return apply(phi, identity(phi.dim_in)) - identity(phi.dim_out)

