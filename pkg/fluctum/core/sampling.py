"""
Seeded random operators for tests and scenario sweeps.

Every stream comes from numpy's counter-based Philox generator keyed by
SeedSequence([seed, *stream]), so the same seed always yields the same
matrices regardless of evaluation order.
"""

import logging
from typing import Sequence

import numpy as np

from fluctum.core.linalg import ComplexMatrix
from fluctum.utils.error_handling import InvalidParameterError

logger = logging.getLogger(__name__)

_U64 = (1 << 64) - 1
SEED_STEP = 0x9E3779B97F4A7C15


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Independent Philox stream for (seed, stream...)."""
    if seed < 0:
        raise InvalidParameterError(f"seed must be a non-negative integer, got {seed}")
    entropy: Sequence[int] = [int(seed) & _U64, *(int(s) & _U64 for s in stream)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def perturb_seed(seed: int, attempt: int) -> int:
    """Seed used for retry number `attempt` (attempt 0 is the seed itself)."""
    return (int(seed) + attempt * SEED_STEP) & _U64


def complex_gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    """Entries with independent standard normal real and imaginary parts."""
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> ComplexMatrix:
    G = complex_gaussian((dim, dim), rng)
    return scale * 0.5 * (G + G.conj().T)


def random_unitary(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    """Haar-distributed unitary (QR of a Ginibre matrix with the R-diagonal phases removed)."""
    Q, R = np.linalg.qr(complex_gaussian((dim, dim), rng))
    d = np.diag(R)
    phases = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return Q * phases


def random_density_matrix(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    G = complex_gaussian((dim, dim), rng)
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_probability_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    weights = rng.exponential(size=dim)
    return weights / weights.sum()
