"""
Gibbs equilibrium states.

Boltzmann factors are always evaluated with the smallest exponent shifted
to zero, so ln Z is finite for every admissible beta.
"""

import logging
import math
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from fluctum.core.linalg import ComplexMatrix, EigenSystem, RealVector, eigh
from fluctum.utils.error_handling import UndefinedQuantityError
from fluctum.utils.input_validation import InputValidator

logger = logging.getLogger(__name__)

LOG_FLOAT_MAX = math.log(sys.float_info.max)


def bounded_exp(x: float) -> float:
    """exp(x), or inf where the result exceeds the float range."""
    return math.inf if x > LOG_FLOAT_MAX else math.exp(x)


def log_partition_function(eigenvalues: RealVector, beta: float) -> float:
    """ln sum_k exp(-beta e_k) for any finite real beta."""
    exponents = -float(beta) * np.asarray(eigenvalues, dtype=float)
    top = float(exponents.max())
    return top + math.log(float(np.sum(np.exp(exponents - top))))


def boltzmann_weights(eigenvalues: RealVector, beta: float) -> RealVector:
    """Normalized populations exp(-beta e_k) / Z."""
    exponents = -float(beta) * np.asarray(eigenvalues, dtype=float)
    weights = np.exp(exponents - exponents.max())
    return weights / weights.sum()


@dataclass(frozen=True, eq=False)
class GibbsState:
    hamiltonian: ComplexMatrix
    beta: float
    spectrum: EigenSystem
    log_Z: float
    populations: RealVector
    rho: ComplexMatrix

    @property
    def Z(self) -> float:
        """inf when Z is beyond the float range; log_Z stays exact."""
        return bounded_exp(self.log_Z)

    @property
    def F(self) -> Optional[float]:
        """-ln(Z)/beta; absent at beta = 0."""
        if self.beta == 0:
            return None
        return -self.log_Z / self.beta

    @property
    def dim(self) -> int:
        return self.spectrum.dim

    def expectation(self, X: ComplexMatrix) -> complex:
        return complex(np.trace(self.rho @ X))


def gibbs_from_spectrum(spectrum: EigenSystem, beta: float, hamiltonian: Optional[ComplexMatrix] = None) -> GibbsState:
    """Gibbs state for an already decomposed Hamiltonian; beta is any finite real."""
    if not math.isfinite(beta):
        raise UndefinedQuantityError(f"beta must be finite, got {beta}")
    populations = boltzmann_weights(spectrum.eigenvalues, beta)
    return GibbsState(
        hamiltonian=spectrum.reconstruct() if hamiltonian is None else hamiltonian,
        beta=float(beta),
        spectrum=spectrum,
        log_Z=log_partition_function(spectrum.eigenvalues, beta),
        populations=populations,
        rho=spectrum.apply(lambda _: populations),
    )


def gibbs(H: ComplexMatrix, beta: float) -> GibbsState:
    """rho = exp(-beta H) / Z with beta in [0, beta_max]."""
    H = InputValidator.hermitian(H, "H")
    beta = InputValidator.beta(beta)
    return gibbs_from_spectrum(eigh(H), beta, hamiltonian=H)


def free_energy_difference(H0: ComplexMatrix, H1: ComplexMatrix, beta: float) -> float:
    """F1 - F0 = -ln(Z1/Z0) / beta."""
    beta = InputValidator.beta(beta)
    if beta == 0:
        raise UndefinedQuantityError("Free energy is undefined at beta = 0")
    H0 = InputValidator.hermitian(H0, "H0")
    H1 = InputValidator.hermitian(H1, "H1")
    InputValidator.same_shape(H0, H1, "H0 and H1")
    log_ratio = log_partition_function(eigh(H1).eigenvalues, beta) - log_partition_function(eigh(H0).eigenvalues, beta)
    return -log_ratio / beta
