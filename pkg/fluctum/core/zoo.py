"""
Example channels and Hamiltonians with closed-form correction terms.

Natural units throughout: mu_B = hbar = e = m = c = 1. Damping channels are
written in the eigenbasis of the Hamiltonian they are paired with, which is
the computational basis. DampingSpec indices are 1-based, as in scenario files.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Sequence, Tuple

import numpy as np

from fluctum.config.settings import settings
from fluctum.core.channel import (
    ChoiMatrix,
    QuantumChannel,
    choi_from_action,
    identity_channel,
    mixture_channel,
    random_channel,
    unitary_channel,
)
from fluctum.core.linalg import ComplexMatrix, identity
from fluctum.core.sampling import make_rng, random_probability_vector, random_unitary
from fluctum.core.thermal import boltzmann_weights
from fluctum.utils.error_handling import ConstraintViolationError, DimensionMismatchError, InvalidParameterError
from fluctum.utils.input_validation import InputValidator

logger = logging.getLogger(__name__)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def _probability(value: float, name: str) -> float:
    return InputValidator.in_range(value, 0.0, 1.0, name)


def _field(vector: Sequence[float]) -> np.ndarray:
    vector = np.asarray(vector, dtype=float).reshape(-1)
    if vector.size != 3:
        raise DimensionMismatchError(f"Field must be a 3-vector, got {vector.size} components")
    return vector


# Qubit


def amplitude_damping_2(p: float) -> QuantumChannel:
    """K0 = diag(sqrt(1-p), 1), K1 = sqrt(p)|2><1|; Bloch vector of G is (0, 0, -p)."""
    p = _probability(p, "p")
    K0 = np.array([[math.sqrt(1.0 - p), 0.0], [0.0, 1.0]], dtype=np.complex128)
    K1 = np.array([[0.0, 0.0], [math.sqrt(p), 0.0]], dtype=np.complex128)
    return QuantumChannel((K0, K1), name=f"amplitude_damping_2(p={p:g})")


def qubit_hamiltonian(field_vector: Sequence[float]) -> ComplexMatrix:
    """H = -B . sigma"""
    B = _field(field_vector)
    return -np.einsum("k,kab->ab", B, np.stack(PAULI))


def qubit_hamiltonian_at_angle(magnitude: float, theta: float) -> ComplexMatrix:
    """Field of the given magnitude at angle theta from tau = (0, 0, -p) of the unrotated damping channel."""
    return qubit_hamiltonian(magnitude * np.array([math.sin(theta), 0.0, -math.cos(theta)]))


def bloch_rotation(axis: Sequence[float], angle: float) -> ComplexMatrix:
    """exp(-i angle n.sigma / 2): rotates Bloch vectors by angle about n."""
    n = _field(axis)
    length = float(np.linalg.norm(n))
    if length == 0:
        raise InvalidParameterError("Rotation axis must be nonzero")
    n = n / length
    generator = np.einsum("k,kab->ab", n, np.stack(PAULI))
    return math.cos(angle / 2) * identity(2) - 1j * math.sin(angle / 2) * generator


def rotated_amplitude_damping(p: float, theta: float) -> QuantumChannel:
    """Amplitude damping followed by a rotation taking tau to p(sin theta, 0, cos theta)."""
    base = amplitude_damping_2(p)
    U = bloch_rotation((0.0, 1.0, 0.0), theta + math.pi)
    return QuantumChannel(tuple(U @ K for K in base.kraus), name=f"rotated_amplitude_damping(p={p:g},theta={theta:g})")


def qubit_correction_analytic(p: float, theta: float, beta: float, magnitude: float) -> float:
    """p tanh(beta B) cos(theta)"""
    return p * math.tanh(beta * magnitude) * math.cos(theta)


def qubit_correction_coordinate_free(tau: Sequence[float], field_vector: Sequence[float], beta: float) -> float:
    """tanh(beta |B|) tau . B / |B|; zero for a vanishing field."""
    B = _field(field_vector)
    magnitude = float(np.linalg.norm(B))
    if magnitude == 0:
        return 0.0
    return math.tanh(beta * magnitude) * float(np.dot(_field(tau), B)) / magnitude


# Spin 1


def gad_3(p: float, q: float) -> QuantumChannel:
    """Three-level damping: K0 = diag(sqrt(1-p), sqrt(1-q), 1), decays 1 -> 3 and 2 -> 3."""
    p, q = _probability(p, "p"), _probability(q, "q")
    K0 = np.diag([math.sqrt(1.0 - p), math.sqrt(1.0 - q), 1.0]).astype(np.complex128)
    K1 = np.zeros((3, 3), dtype=np.complex128)
    K1[2, 0] = math.sqrt(p)
    K2 = np.zeros((3, 3), dtype=np.complex128)
    K2[2, 1] = math.sqrt(q)
    return QuantumChannel((K0, K1, K2), name=f"gad_3(p={p:g},q={q:g})")


def spin1_operators() -> Tuple[ComplexMatrix, ComplexMatrix, ComplexMatrix]:
    """(J_x, J_y, J_z) with J_z = diag(1, 0, -1)."""
    s = 1.0 / math.sqrt(2.0)
    Jx = s * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=np.complex128)
    Jy = s * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=np.complex128)
    Jz = np.diag([1.0, 0.0, -1.0]).astype(np.complex128)
    return Jx, Jy, Jz


def spin1_hamiltonian(field_vector: Sequence[float]) -> ComplexMatrix:
    """H = B . J"""
    B = _field(field_vector)
    return np.einsum("k,kab->ab", B, np.stack(spin1_operators()))


def spin1_hamiltonian_at_angle(magnitude: float, theta: float) -> ComplexMatrix:
    """Field of the given magnitude at angle theta from the z axis, in the xz plane."""
    return spin1_hamiltonian(magnitude * np.array([math.sin(theta), 0.0, math.cos(theta)]))


def spin1_high_T_correction(p: float, q: float, beta: float, field_vector: Sequence[float]) -> float:
    """(2p + q) beta B_z / 3, first order in beta."""
    return (2.0 * p + q) * beta * float(_field(field_vector)[2]) / 3.0


def spin1_low_T_correction(p: float, q: float, theta: float) -> float:
    """(p + q/2) cos(theta) + (q/8)(1 + 3 cos(2 theta))"""
    return (p + q / 2.0) * math.cos(theta) + (q / 8.0) * (1.0 + 3.0 * math.cos(2.0 * theta))


# N levels


@dataclass(frozen=True)
class DampingSpec:
    """
    Damping channel on N levels.

    damped: the set I of levels that decay (1-based); every other level is in J.
    z: diagonal amplitude z_m for each m in I.
    a: transition amplitudes a_mn for |n> -> |m>, keyed (m, n) with n in I.
    """

    dim: int
    damped: Tuple[int, ...]
    z: Mapping[int, complex]
    a: Mapping[Tuple[int, int], complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidParameterError(f"dim must be positive, got {self.dim}")
        levels = range(1, self.dim + 1)
        damped = tuple(sorted(set(self.damped)))
        if any(m not in levels for m in damped):
            raise InvalidParameterError(f"Damped levels {damped} must lie in 1..{self.dim}")
        if set(self.z) != set(damped):
            raise InvalidParameterError(f"z must give one amplitude per damped level {damped}, got {sorted(self.z)}")
        for (m, n) in self.a:
            if n not in damped or m not in levels or m == n:
                raise InvalidParameterError(f"Amplitude a[{m},{n}] needs n in I, m in 1..{self.dim} and m != n")
        object.__setattr__(self, "damped", damped)
        if not damped:
            logger.info("DampingSpec with an empty damped set is the identity map")

    @property
    def undamped(self) -> Tuple[int, ...]:
        return tuple(m for m in range(1, self.dim + 1) if m not in self.damped)

    def constraint_defects(self) -> Dict[int, float]:
        """|z_n|^2 + sum_m |a_mn|^2 - 1 for every n in I."""
        return {
            n: abs(self.z[n]) ** 2 + sum(abs(amp) ** 2 for (m, k), amp in self.a.items() if k == n) - 1.0
            for n in self.damped
        }

    def inflow(self) -> np.ndarray:
        """y_m = sum_{n != m} |a_mn|^2, indexed 0..N-1."""
        y = np.zeros(self.dim)
        for (m, _), amp in self.a.items():
            y[m - 1] += abs(amp) ** 2
        return y


def generalized_damping(spec: DampingSpec) -> QuantumChannel:
    """Kraus set K0 followed by K_mn ordered by (n, m)."""
    defects = spec.constraint_defects()
    worst = max((abs(d) for d in defects.values()), default=0.0)
    if worst > settings.tolerances.equality:
        raise ConstraintViolationError(
            f"Damping amplitudes violate |z_n|^2 + sum_m |a_mn|^2 = 1 (worst defect {worst:.3e})",
            data={"defects": defects},
        )
    diagonal = np.ones(spec.dim, dtype=np.complex128)
    for m in spec.damped:
        diagonal[m - 1] = spec.z[m]
    kraus = [np.diag(diagonal)]
    for (m, n) in sorted(spec.a, key=lambda key: (key[1], key[0])):
        K = np.zeros((spec.dim, spec.dim), dtype=np.complex128)
        K[m - 1, n - 1] = spec.a[(m, n)]
        kraus.append(K)
    return QuantumChannel(tuple(kraus), name=f"generalized_damping(N={spec.dim},I={list(spec.damped)})")


def damping_nonunitality_diagonal(spec: DampingSpec) -> np.ndarray:
    """Diagonal x of G: (|z_m|^2 + y_m - 1)/N on I and y_n/N on J."""
    x = spec.inflow()
    for m in spec.damped:
        x[m - 1] += abs(spec.z[m]) ** 2 - 1.0
    return x / spec.dim


def diagonal_correction(x: Sequence[float], energies: Sequence[float], beta: float) -> float:
    """N sum_n x_n exp(-beta e_n) / sum_n exp(-beta e_n) for G diagonal in the energy basis."""
    x = np.asarray(x, dtype=float)
    energies = np.asarray(energies, dtype=float)
    if x.shape != energies.shape:
        raise DimensionMismatchError(f"x has {x.size} entries but there are {energies.size} energies")
    return x.size * float(np.dot(boltzmann_weights(energies, beta), x))


def split_damping_3(p: float, q: float) -> QuantumChannel:
    """Three-level damping out of level 1 only, feeding levels 2 and 3; needs q <= p."""
    p, q = _probability(p, "p"), _probability(q, "q")
    if q > p:
        raise InvalidParameterError(f"This damping variant needs q <= p, got p={p}, q={q}")
    spec = DampingSpec(
        dim=3,
        damped=(1,),
        z={1: math.sqrt(1.0 - p)},
        a={(2, 1): math.sqrt(q), (3, 1): math.sqrt(p - q)},
    )
    return generalized_damping(spec)


# Generic channels


def complete_contraction(psi: Sequence[complex]) -> QuantumChannel:
    """K_n = |psi><n|, mapping every state to |psi><psi|."""
    psi = InputValidator.unit_vector(psi, "psi")
    dim = psi.size
    kraus = tuple(np.outer(psi, np.eye(dim)[n]) for n in range(dim))
    return QuantumChannel(kraus, name=f"complete_contraction[{dim}]")


def basis_state(dim: int, level: int) -> np.ndarray:
    """|level> with 1-based level."""
    if not 1 <= level <= dim:
        raise InvalidParameterError(f"level must lie in 1..{dim}, got {level}")
    psi = np.zeros(dim, dtype=np.complex128)
    psi[level - 1] = 1.0
    return psi


def completely_depolarizing(dim: int) -> QuantumChannel:
    """rho -> Tr(rho) I/N via the N^2 Kraus operators |i><j| / sqrt(N)."""
    scale = 1.0 / math.sqrt(dim)
    kraus = []
    for i in range(dim):
        for j in range(dim):
            K = np.zeros((dim, dim), dtype=np.complex128)
            K[i, j] = scale
            kraus.append(K)
    return QuantumChannel(tuple(kraus), name=f"depolarizing[{dim}]")


def random_unitary_mixture(dim: int, n_unitaries: int, seed: int) -> QuantumChannel:
    """Convex combination of seeded Haar unitaries; bistochastic."""
    rng = make_rng(seed, dim, n_unitaries, 1)
    weights = random_probability_vector(n_unitaries, rng)
    unitaries = [random_unitary(dim, rng) for _ in range(n_unitaries)]
    return mixture_channel(weights, unitaries, name=f"unitary_mixture[{dim},{n_unitaries},{seed}]")


def swap_channel(dim: int) -> QuantumChannel:
    """Unitary exchange of two dim-level systems."""
    S = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for a in range(dim):
        for b in range(dim):
            S[b * dim + a, a * dim + b] = 1.0
    return unitary_channel(S, name=f"swap[{dim}x{dim}]")


def transpose_choi(dim: int) -> ChoiMatrix:
    """Choi matrix of X -> X^T, which is positive but not completely positive."""
    return choi_from_action(lambda X: X.T, dim)


CHANNEL_KINDS: Dict[str, Callable[..., QuantumChannel]] = {
    "amplitude_damping_2": amplitude_damping_2,
    "rotated_amplitude_damping": rotated_amplitude_damping,
    "gad_3": gad_3,
    "split_damping_3": split_damping_3,
    "generalized_damping": generalized_damping,
    "complete_contraction": complete_contraction,
    "identity": identity_channel,
    "depolarizing": completely_depolarizing,
    "unitary_mixture": random_unitary_mixture,
    "random": random_channel,
    "swap": swap_channel,
}
