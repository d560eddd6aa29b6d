"""
Two-point measurement statistics and the fluctuation identities built on them.

A channel Phi is sandwiched between projective measurements of an initial
observable (eigenvalues a_i) and a final one (eigenvalues b_j). Transition
probabilities are p(b_j|a_i) = <b_j|Phi(|a_i><a_i|)|b_j>; work is b - a.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, NamedTuple, Optional, Tuple, Union

import numpy as np

from fluctum.config.settings import settings
from fluctum.core.channel import QuantumChannel
from fluctum.core.linalg import ComplexMatrix, EigenSystem, RealVector, eigh
from fluctum.core.nonunitality import nonunitality_operator
from fluctum.core.thermal import (
    LOG_FLOAT_MAX,
    boltzmann_weights,
    bounded_exp,
    gibbs_from_spectrum,
    log_partition_function,
)
from fluctum.utils.error_handling import DegenerateSpectrumError, DimensionMismatchError
from fluctum.utils.input_validation import InputValidator

logger = logging.getLogger(__name__)

NONPOSITIVE_CORRECTION = "nonpositive_correction_factor"


class Partition(str, Enum):
    """Partition function used by the first-order high-temperature correction"""
    EXACT = "exact"
    INFINITE_TEMPERATURE = "infinite_temperature"


@dataclass(frozen=True, eq=False)
class TpmDistribution:
    a_values: RealVector
    b_values: RealVector
    p_a: RealVector
    cond: np.ndarray

    @property
    def joint(self) -> np.ndarray:
        """p(a_i, b_j) = p(a_i) p(b_j|a_i)"""
        return self.p_a[:, None] * self.cond

    def row_sums(self) -> RealVector:
        return self.cond.sum(axis=1)


class IdentityCheck(NamedTuple):
    lhs: float
    rhs: float
    residual: float


class HeatTransferCheck(NamedTuple):
    lhs: float
    rhs: float
    residual: float
    delta_S: float
    entropy_bound: Optional[float]


def relative_residual(lhs: float, rhs: float) -> float:
    return abs(lhs - rhs) / max(1.0, abs(rhs))


def tpm_from_bases(phi: QuantumChannel, initial: EigenSystem, p_a: RealVector, final: EigenSystem) -> TpmDistribution:
    """TPM statistics in given eigenbases of the initial and final observables."""
    if initial.dim != phi.dim_in or final.dim != phi.dim_out:
        raise DimensionMismatchError(
            f"Observables of size {initial.dim}->{final.dim} do not match channel {phi.dim_in}->{phi.dim_out}"
        )
    p_a = InputValidator.probability_vector(p_a, initial.dim, "p_a")
    # T[n, j, i] = <b_j|K_n|a_i>
    T = np.einsum("bj,nba,ai->nji", final.eigenvectors.conj(), phi.stacked, initial.eigenvectors)
    cond = np.sum(np.abs(T) ** 2, axis=0).T
    return TpmDistribution(a_values=initial.eigenvalues, b_values=final.eigenvalues, p_a=p_a, cond=cond)


def tpm_distribution(phi: QuantumChannel, A: ComplexMatrix, p_a: RealVector, B: ComplexMatrix) -> TpmDistribution:
    A = InputValidator.dimension(InputValidator.hermitian(A, "A"), phi.dim_in, "A")
    B = InputValidator.dimension(InputValidator.hermitian(B, "B"), phi.dim_out, "B")
    return tpm_from_bases(phi, eigh(A), p_a, eigh(B))


def double_bracket(dist: TpmDistribution, f: Callable[[Any, Any], Any]) -> float:
    """sum_ij p(a_i, b_j) f(a_i, b_j); f may be a numpy ufunc expression or a scalar function."""
    a_grid, b_grid = np.meshgrid(dist.a_values, dist.b_values, indexing="ij")
    try:
        values = np.asarray(f(a_grid, b_grid), dtype=float)
    except (TypeError, ValueError):
        values = None
    if values is None or values.shape != a_grid.shape:
        values = np.vectorize(f, otypes=[float])(a_grid, b_grid)
    return float(np.sum(dist.joint * values))


def _log_exponential_average(dist: TpmDistribution, alpha: float, beta: float) -> float:
    """ln <<exp(alpha a - beta b)>> by log-sum-exp over the support of p(a, b)."""
    with np.errstate(divide="ignore"):
        terms = np.log(dist.joint) + alpha * dist.a_values[:, None] - beta * dist.b_values[None, :]
    top = float(terms.max())
    if not math.isfinite(top):
        return -math.inf
    return top + math.log(float(np.sum(np.exp(terms - top))))


def _signed_log(log_prefactor: float, factor: float) -> Tuple[int, float]:
    """Sign and ln|.| of exp(log_prefactor) * factor."""
    if factor == 0:
        return 0, -math.inf
    return (1 if factor > 0 else -1), log_prefactor + math.log(abs(factor))


def _signed_exp(sign: int, log_abs: float) -> float:
    return 0.0 if sign == 0 else sign * bounded_exp(log_abs)


def _log_relative_residual(log_lhs: float, rhs_sign: int, log_abs_rhs: float) -> float:
    """relative_residual(exp(log_lhs), rhs) computed from logarithms once |rhs| >= 1."""
    if rhs_sign == 0 or log_abs_rhs < 0:
        return relative_residual(bounded_exp(log_lhs), _signed_exp(rhs_sign, log_abs_rhs))
    diff = log_lhs - log_abs_rhs
    if diff > LOG_FLOAT_MAX:
        return math.inf
    if rhs_sign > 0:
        return abs(math.expm1(diff))
    return math.exp(diff) + 1.0


def proposition1_check(phi: QuantumChannel, A: ComplexMatrix, alpha: float, B: ComplexMatrix, beta: float) -> IdentityCheck:
    """
    Exponential TPM average for a Gibbs-form input exp(-alpha A)/Z_A.

    lhs = <<exp(alpha a - beta b)>>; rhs = N_A Z_B / (N_B Z_A) * (1 + N_B Tr(rho_B G))
    with rho_B = exp(-beta B)/Z_B. alpha and beta may be any finite reals.
    """
    A = InputValidator.dimension(InputValidator.hermitian(A, "A"), phi.dim_in, "A")
    B = InputValidator.dimension(InputValidator.hermitian(B, "B"), phi.dim_out, "B")
    spectrum_a, spectrum_b = eigh(A), eigh(B)
    dist = tpm_from_bases(phi, spectrum_a, boltzmann_weights(spectrum_a.eigenvalues, alpha), spectrum_b)
    log_lhs = _log_exponential_average(dist, alpha, beta)

    final_state = gibbs_from_spectrum(spectrum_b, beta, B)
    log_Z_a = log_partition_function(spectrum_a.eigenvalues, alpha)
    log_prefactor = math.log(phi.dim_in / phi.dim_out) + final_state.log_Z - log_Z_a
    factor = 1.0 + phi.dim_out * final_state.expectation(nonunitality_operator(phi)).real
    sign, log_abs_rhs = _signed_log(log_prefactor, factor)
    return IdentityCheck(
        bounded_exp(log_lhs),
        _signed_exp(sign, log_abs_rhs),
        _log_relative_residual(log_lhs, sign, log_abs_rhs),
    )


@dataclass(frozen=True)
class JarzynskiReport:
    dim: int
    beta0: float
    beta1: float
    lhs: float
    z_ratio: float
    correction: float
    rhs: float
    residual: float
    mean_work: float
    delta_F: Optional[float] = None
    jensen_rhs: Optional[float] = None
    flags: Tuple[str, ...] = field(default_factory=tuple)
    # exact logarithms; lhs, z_ratio and rhs read inf past the float range
    log_lhs: Optional[float] = None
    log_rhs: Optional[float] = None

    def jensen_holds(self, tol: Optional[float] = None) -> bool:
        """<<W>> >= Delta F - ln(1 + correction)/beta; vacuous when the bound is absent."""
        tol = settings.tolerances.verification if tol is None else tol
        if self.jensen_rhs is None:
            return True
        return self.mean_work >= self.jensen_rhs - tol

    def to_row(self, channel_id: str) -> Dict[str, Any]:
        return {
            "channel_id": channel_id,
            "N": self.dim,
            "beta0": self.beta0,
            "beta1": self.beta1,
            "lhs": self.lhs,
            "z_ratio": self.z_ratio,
            "correction": self.correction,
            "rhs": self.rhs,
            "residual": self.residual,
            "mean_work": self.mean_work,
            "delta_F": self.delta_F,
            "jensen_rhs": self.jensen_rhs,
            "flags": ";".join(self.flags),
        }


def _require_square_pair(phi: QuantumChannel, H0: ComplexMatrix, H1: ComplexMatrix) -> Tuple[np.ndarray, np.ndarray]:
    if not phi.is_square:
        raise DimensionMismatchError(f"Work statistics need a square channel, got {phi.dim_in}->{phi.dim_out}")
    H0 = InputValidator.dimension(InputValidator.hermitian(H0, "H0"), phi.dim_in, "H0")
    H1 = InputValidator.dimension(InputValidator.hermitian(H1, "H1"), phi.dim_out, "H1")
    return H0, H1


def generalized_jarzynski(phi: QuantumChannel, H0: ComplexMatrix, H1: ComplexMatrix, beta0: float, beta1: float) -> JarzynskiReport:
    """
    Both sides of <<exp(beta0 e0 - beta1 e1)>> = (Z1/Z0)(1 + N Tr(omega1 G))
    for the initial state gibbs(H0, beta0).

    At equal temperatures the free energy difference and the Jensen lower
    bound on the mean work are filled in as well.
    """
    H0, H1 = _require_square_pair(phi, H0, H1)
    beta0 = InputValidator.beta(beta0, "beta0")
    beta1 = InputValidator.beta(beta1, "beta1")
    n = phi.dim_in

    initial = gibbs_from_spectrum(eigh(H0), beta0, H0)
    final = gibbs_from_spectrum(eigh(H1), beta1, H1)
    dist = tpm_from_bases(phi, initial.spectrum, initial.populations, final.spectrum)

    log_lhs = _log_exponential_average(dist, beta0, beta1)
    correction = n * final.expectation(nonunitality_operator(phi)).real
    log_ratio = final.log_Z - initial.log_Z
    sign, log_abs_rhs = _signed_log(log_ratio, 1.0 + correction)
    mean_work = double_bracket(dist, lambda a, b: b - a)

    delta_F = jensen_rhs = None
    flags = []
    if beta0 == beta1 and beta0 > 0:
        delta_F = -log_ratio / beta0
        if 1.0 + correction > 0:
            jensen_rhs = delta_F - math.log1p(correction) / beta0
        else:
            flags.append(NONPOSITIVE_CORRECTION)
            logger.warning("1 + correction = %.6g is not positive; Jensen bound undefined", 1.0 + correction)

    return JarzynskiReport(
        dim=n,
        beta0=beta0,
        beta1=beta1,
        lhs=bounded_exp(log_lhs),
        z_ratio=bounded_exp(log_ratio),
        correction=correction,
        rhs=_signed_exp(sign, log_abs_rhs),
        residual=_log_relative_residual(log_lhs, sign, log_abs_rhs),
        mean_work=mean_work,
        delta_F=delta_F,
        jensen_rhs=jensen_rhs,
        flags=tuple(flags),
        log_lhs=log_lhs,
        log_rhs=log_abs_rhs if sign > 0 else None,
    )


def correction_term(phi: QuantumChannel, H1: ComplexMatrix, beta1: float) -> float:
    """N Tr(omega1 G) with omega1 = gibbs(H1, beta1)."""
    H1 = InputValidator.dimension(InputValidator.hermitian(H1, "H1"), phi.dim_out, "H1")
    beta1 = InputValidator.beta(beta1, "beta1")
    final = gibbs_from_spectrum(eigh(H1), beta1, H1)
    return phi.dim_out * final.expectation(nonunitality_operator(phi)).real


def high_temperature_correction(
    phi: QuantumChannel,
    H1: ComplexMatrix,
    beta: float,
    partition: Union[Partition, str] = Partition.EXACT,
) -> float:
    """
    First-order term N Z1^{-1} (-beta Tr(H1 G)); accurate to O(beta^2).

    partition="infinite_temperature" replaces Z1(beta) by N, which gives the
    strict first-order coefficient used by closed-form expressions.
    """
    H1 = InputValidator.dimension(InputValidator.hermitian(H1, "H1"), phi.dim_out, "H1")
    beta = InputValidator.beta(beta)
    n = phi.dim_out
    if Partition(partition) is Partition.EXACT:
        log_Z = log_partition_function(eigh(H1).eigenvalues, beta)
    else:
        log_Z = math.log(n)
    overlap = float(np.trace(H1 @ nonunitality_operator(phi)).real)
    if beta == 0 or overlap == 0:
        return 0.0
    return -n * beta * overlap * bounded_exp(-log_Z)


def low_temperature_correction(phi: QuantumChannel, H1: ComplexMatrix) -> float:
    """N <e0|G|e0> for a nondegenerate ground state e0 of H1."""
    H1 = InputValidator.dimension(InputValidator.hermitian(H1, "H1"), phi.dim_out, "H1")
    spectrum = eigh(H1)
    if spectrum.dim > 1:
        gap = float(spectrum.eigenvalues[1] - spectrum.eigenvalues[0])
        if gap <= settings.tolerances.ground_gap * float(np.linalg.norm(H1)):
            raise DegenerateSpectrumError(f"Ground state of H1 is degenerate (gap {gap:.3e})", data={"gap": gap})
    ground = spectrum.vector(0)
    return phi.dim_out * float(np.vdot(ground, nonunitality_operator(phi) @ ground).real)


def product_eigensystem(first: EigenSystem, alpha: float, second: EigenSystem, beta: float) -> EigenSystem:
    """Eigen-decomposition of alpha A x I + I x beta B in the product eigenbasis, sorted ascending."""
    values = np.add.outer(alpha * first.eigenvalues, beta * second.eigenvalues).reshape(-1)
    vectors = np.kron(first.eigenvectors, second.eigenvectors)
    order = np.argsort(values, kind="stable")
    return EigenSystem(eigenvalues=values[order], eigenvectors=vectors[:, order])


def heat_transfer_check(psi: QuantumChannel, A: ComplexMatrix, alpha: float, B: ComplexMatrix, beta: float) -> HeatTransferCheck:
    """
    Exchange between two systems prepared in Gibbs states of A at alpha and B at beta.

    C = alpha A x I + I x beta B is measured before and after psi; with c and
    c' the two outcomes, lhs = <<exp(c - c')>>, rhs = 1 + N_A N_B Tr(rho_AB G),
    delta_S = <<c' - c>> and entropy_bound = -ln(rhs), the Jensen lower bound
    on delta_S (absent when rhs <= 0).
    """
    A = InputValidator.hermitian(A, "A")
    B = InputValidator.hermitian(B, "B")
    alpha = InputValidator.beta(alpha, "alpha")
    beta = InputValidator.beta(beta, "beta")
    n = A.shape[0] * B.shape[0]
    if not psi.is_square or psi.dim_in != n:
        raise DimensionMismatchError(
            f"Composite channel must act on {A.shape[0]}x{B.shape[0]} = {n} levels, got {psi.dim_in}->{psi.dim_out}"
        )

    composite = product_eigensystem(eigh(A), alpha, eigh(B), beta)
    state = gibbs_from_spectrum(composite, 1.0)
    dist = tpm_from_bases(psi, composite, state.populations, composite)

    log_lhs = _log_exponential_average(dist, 1.0, 1.0)
    rhs = 1.0 + n * state.expectation(nonunitality_operator(psi)).real
    sign, log_abs_rhs = _signed_log(0.0, rhs)
    delta_S = double_bracket(dist, lambda c, c_final: c_final - c)
    entropy_bound = -math.log(rhs) if rhs > 0 else None
    return HeatTransferCheck(
        bounded_exp(log_lhs), rhs, _log_relative_residual(log_lhs, sign, log_abs_rhs), delta_S, entropy_bound
    )
