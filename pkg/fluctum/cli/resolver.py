"""
Scenario resolution - expands a Scenario into concrete grid points

Each grid point carries the channel, both Hamiltonians and both inverse
temperatures needed by one report row. Expansion order is channel variant,
then field angle, then beta0, then beta1; the resulting index is the row
order of every report.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from fluctum.core.bloch import to_bloch
from fluctum.core.channel import QuantumChannel
from fluctum.core.linalg import ComplexMatrix
from fluctum.core.nonunitality import nonunitality_operator
from fluctum.core.sampling import make_rng, random_hermitian
from fluctum.core.zoo import (
    CHANNEL_KINDS,
    DampingSpec,
    basis_state,
    damping_nonunitality_diagonal,
    diagonal_correction,
    qubit_correction_analytic,
    qubit_correction_coordinate_free,
    qubit_hamiltonian,
    spin1_hamiltonian,
    spin1_high_T_correction,
    spin1_low_T_correction,
)
from fluctum.models.matrices import ChannelFile, MatrixLiteral
from fluctum.models.scenario import (
    AmplitudeDampingRef,
    CompleteContractionRef,
    DepolarizingRef,
    DiagonalHamiltonianRef,
    Gad3Ref,
    GeneralizedDampingRef,
    HamiltonianRef,
    IdentityRef,
    KrausFileRef,
    QubitHamiltonianRef,
    RandomChannelRef,
    RandomHamiltonianRef,
    RotatedAmplitudeDampingRef,
    Scenario,
    Spin1HamiltonianRef,
    SplitDamping3Ref,
    SwapRef,
    UnitaryMixtureRef,
    grid_values,
    to_complex,
)
from fluctum.utils.error_handling import DimensionMismatchError, ScenarioError

logger = logging.getLogger(__name__)

# make_rng stream tag for Hamiltonians drawn by the resolver
HAMILTONIAN_STREAM = 2


@dataclass(frozen=True)
class ChannelVariant:
    """One point of a channel's parameter grid; build(theta) returns the channel."""
    kind: str
    params: Dict[str, float]
    build: Callable[[Optional[float]], QuantumChannel]
    needs_theta: bool = False
    # closed-form diagonal of G in the computational basis, when known
    diagonal: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class GridPoint:
    index: int
    channel_id: str
    channel_label: str
    channel: QuantumChannel
    H0: ComplexMatrix
    H1: ComplexMatrix
    beta0: float
    beta1: float
    theta: Optional[float] = None
    params: Dict[str, float] = field(default_factory=dict)
    # closed-form correction term as a function of beta1
    analytic: Optional[Callable[[float], float]] = None
    # closed forms of the first-order high-T term and of the ground-state limit
    analytic_high_t: Optional[Callable[[float], float]] = None
    analytic_low_t: Optional[float] = None
    # first point of its channel; channel-level reports are taken here
    primary: bool = False

    def params_label(self) -> str:
        return ";".join(f"{key}={value:.17g}" for key, value in self.params.items())


def _fixed(channel: QuantumChannel) -> Callable[[Optional[float]], QuantumChannel]:
    return lambda theta: channel


def channel_variants(ref, seed: int, base_dir: Path) -> List[ChannelVariant]:
    """Expand one channel reference over its parameter grids."""
    make = CHANNEL_KINDS.get(ref.kind)
    if isinstance(ref, AmplitudeDampingRef):
        return [
            ChannelVariant(
                ref.kind, {"p": p}, _fixed(make(p)), diagonal=np.array([-p, p]) / 2
            )
            for p in grid_values(ref.p)
        ]

    if isinstance(ref, RotatedAmplitudeDampingRef):
        if ref.theta is None:
            return [
                ChannelVariant(ref.kind, {"p": p}, lambda theta, p=p: make(p, theta), needs_theta=True)
                for p in grid_values(ref.p)
            ]
        return [
            ChannelVariant(ref.kind, {"p": p, "channel_theta": t}, _fixed(make(p, t)))
            for p, t in itertools.product(grid_values(ref.p), grid_values(ref.theta))
        ]

    if isinstance(ref, Gad3Ref):
        return [
            ChannelVariant(ref.kind, {"p": p, "q": q}, _fixed(make(p, q)), diagonal=np.array([-p, -q, p + q]) / 3)
            for p, q in itertools.product(grid_values(ref.p), grid_values(ref.q))
        ]

    if isinstance(ref, SplitDamping3Ref):
        variants = []
        for p, q in itertools.product(grid_values(ref.p), grid_values(ref.q)):
            if q > p:
                logger.info("Skipping split_damping_3 point p=%g, q=%g (needs q <= p)", p, q)
                continue
            variants.append(
                ChannelVariant(ref.kind, {"p": p, "q": q}, _fixed(make(p, q)), diagonal=np.array([-p, q, p - q]) / 3)
            )
        if not variants:
            raise ScenarioError("split_damping_3 grid has no point with q <= p")
        return variants

    if isinstance(ref, GeneralizedDampingRef):
        amplitudes = {}
        for m, n, re, im in ref.a:
            if (m, n) in amplitudes:
                raise ScenarioError(f"Transition amplitude a[{m},{n}] is given twice")
            amplitudes[(m, n)] = complex(re, im)
        spec = DampingSpec(
            dim=ref.dim,
            damped=tuple(ref.damped),
            z={m: to_complex(z) for m, z in zip(ref.damped, ref.z)},
            a=amplitudes,
        )
        return [ChannelVariant(ref.kind, {}, _fixed(make(spec)), diagonal=damping_nonunitality_diagonal(spec))]

    if isinstance(ref, CompleteContractionRef):
        if ref.psi is not None:
            psi = np.array([to_complex(v) for v in ref.psi])
        else:
            psi = basis_state(ref.dim, ref.level)
        return [ChannelVariant(ref.kind, {}, _fixed(make(psi)))]

    if isinstance(ref, IdentityRef):
        return [ChannelVariant(ref.kind, {}, _fixed(make(ref.dim)), diagonal=np.zeros(ref.dim))]

    if isinstance(ref, DepolarizingRef):
        return [ChannelVariant(ref.kind, {}, _fixed(make(ref.dim)), diagonal=np.zeros(ref.dim))]

    if isinstance(ref, SwapRef):
        return [ChannelVariant(ref.kind, {}, _fixed(make(ref.dim)), diagonal=np.zeros(ref.dim ** 2))]

    if isinstance(ref, UnitaryMixtureRef):
        return [
            ChannelVariant(ref.kind, {"seed": seed + k}, _fixed(make(ref.dim, ref.n_unitaries, seed + k)))
            for k in range(ref.count)
        ]

    if isinstance(ref, RandomChannelRef):
        return [
            ChannelVariant(ref.kind, {"seed": seed + k}, _fixed(make(ref.dim, ref.n_kraus, seed + k)))
            for k in range(ref.count)
        ]

    if isinstance(ref, KrausFileRef):
        path = ref.path if ref.path.is_absolute() else base_dir / ref.path
        try:
            channel_file = ChannelFile.load(path)
        except OSError as e:
            raise ScenarioError(f"Cannot read Kraus file {path}: {e}") from e
        channel = QuantumChannel(tuple(channel_file.to_arrays()), name=f"kraus_file[{path.name}]")
        return [ChannelVariant(ref.kind, {}, _fixed(channel))]

    raise ScenarioError(f"Unsupported channel kind: {getattr(ref, 'kind', type(ref).__name__)}")


def qubit_field_at_angle(magnitude: float, theta: float) -> np.ndarray:
    return magnitude * np.array([math.sin(theta), 0.0, -math.cos(theta)])


def spin1_field_at_angle(magnitude: float, theta: float) -> np.ndarray:
    return magnitude * np.array([math.sin(theta), 0.0, math.cos(theta)])


def build_hamiltonian(ref: HamiltonianRef, theta: Optional[float], seed: int, variant_index: int, role: int = 0) -> ComplexMatrix:
    """
    Concrete Hamiltonian for one grid point.

    Magnitude forms take their direction from theta; random Hamiltonians are
    drawn from a stream keyed by the seed, the role (0 initial, 1 final) and
    the channel variant.
    """
    if isinstance(ref, MatrixLiteral):
        return ref.to_array()
    if isinstance(ref, QubitHamiltonianRef):
        if ref.field is not None:
            return qubit_hamiltonian(ref.field)
        return qubit_hamiltonian(qubit_field_at_angle(ref.magnitude, theta))
    if isinstance(ref, Spin1HamiltonianRef):
        if ref.field is not None:
            return spin1_hamiltonian(ref.field)
        return spin1_hamiltonian(spin1_field_at_angle(ref.magnitude, theta))
    if isinstance(ref, DiagonalHamiltonianRef):
        return np.diag(np.asarray(ref.energies, dtype=float)).astype(np.complex128)
    if isinstance(ref, RandomHamiltonianRef):
        rng = make_rng(seed, HAMILTONIAN_STREAM, role, ref.dim, variant_index)
        return random_hermitian(ref.dim, rng, ref.scale)
    raise ScenarioError(f"Unsupported Hamiltonian reference: {type(ref).__name__}")


def analytic_correction(
    variant: ChannelVariant,
    channel: QuantumChannel,
    ref: HamiltonianRef,
    theta: Optional[float],
) -> Optional[Callable[[float], float]]:
    """Closed-form correction term for the final Hamiltonian, when one exists."""
    if isinstance(ref, QubitHamiltonianRef) and channel.is_square and channel.dim_out == 2:
        if variant.kind == "amplitude_damping_2" and ref.magnitude is not None:
            p, magnitude = variant.params["p"], ref.magnitude
            return lambda beta: qubit_correction_analytic(p, theta, beta, magnitude)
        field_vector = np.asarray(ref.field) if ref.field is not None else qubit_field_at_angle(ref.magnitude, theta)
        tau = to_bloch(nonunitality_operator(channel)).components
        return lambda beta: qubit_correction_coordinate_free(tau, field_vector, beta)
    if isinstance(ref, DiagonalHamiltonianRef) and variant.diagonal is not None:
        if len(ref.energies) == variant.diagonal.size:
            x, energies = variant.diagonal, list(ref.energies)
            return lambda beta: diagonal_correction(x, energies, beta)
    return None


def spin1_limits(
    variant: ChannelVariant,
    ref: HamiltonianRef,
    theta: Optional[float],
) -> Tuple[Optional[Callable[[float], float]], Optional[float]]:
    """
    High- and low-temperature closed forms for three-level damping under a spin-1 field.

    G is diagonal in the J_z basis, so only the polar angle of the field enters;
    a zero field has no ground-state limit.
    """
    if variant.kind != "gad_3" or not isinstance(ref, Spin1HamiltonianRef):
        return None, None
    p, q = variant.params["p"], variant.params["q"]
    if ref.field is not None:
        field_vector = np.asarray(ref.field, dtype=float)
        magnitude = float(np.linalg.norm(field_vector))
        polar = math.acos(min(1.0, max(-1.0, field_vector[2] / magnitude))) if magnitude > 0 else None
    else:
        field_vector = spin1_field_at_angle(ref.magnitude, theta)
        polar = theta if ref.magnitude > 0 else None

    def high_t(beta: float) -> float:
        return spin1_high_T_correction(p, q, beta, field_vector)

    return high_t, None if polar is None else spin1_low_T_correction(p, q, polar)


def _check_dims(channel: QuantumChannel, H0: ComplexMatrix, H1: ComplexMatrix, channel_id: str) -> None:
    if H0.shape != (channel.dim_in, channel.dim_in) or H1.shape != (channel.dim_out, channel.dim_out):
        raise DimensionMismatchError(
            f"{channel_id}: channel maps {channel.dim_in} -> {channel.dim_out} levels but the Hamiltonians "
            f"are {H0.shape[0]}x{H0.shape[1]} and {H1.shape[0]}x{H1.shape[1]}",
            data={"channel_id": channel_id},
        )


def resolve_scenario(scenario: Scenario, seed: int, base_dir: Optional[Path] = None) -> List[GridPoint]:
    """Expand a scenario into grid points ordered by grid coordinates."""
    base_dir = Path(".") if base_dir is None else Path(base_dir)
    variants = channel_variants(scenario.channel, seed, base_dir)

    thetas: List[Optional[float]] = [None]
    if scenario.uses_theta():
        thetas = grid_values(scenario.theta)
        if not thetas:
            raise ScenarioError("Scenario uses a field angle or rotated channel but gives no 'theta'")
    elif scenario.theta is not None:
        logger.warning("Scenario '%s' gives a theta grid that nothing uses; ignoring it", scenario.id)

    beta0_values = grid_values(scenario.beta0)
    beta1_values = grid_values(scenario.beta1)
    initial_ref, final_ref = scenario.hamiltonian_initial, scenario.final_hamiltonian

    points: List[GridPoint] = []
    seen = set()
    for k, variant in enumerate(variants):
        fixed_channel = None if variant.needs_theta else variant.build(None)
        for theta in thetas:
            channel = fixed_channel if fixed_channel is not None else variant.build(theta)
            channel_label = f"{scenario.id}:{channel.name}"
            channel_id = channel_label
            if theta is not None:
                channel_id += f"@theta={theta:.6g}"
            H0 = build_hamiltonian(initial_ref, theta, seed, k)
            H1 = H0 if final_ref is initial_ref else build_hamiltonian(final_ref, theta, seed, k, role=1)
            _check_dims(channel, H0, H1, channel_id)
            analytic = analytic_correction(variant, channel, final_ref, theta)
            analytic_high_t, analytic_low_t = spin1_limits(variant, final_ref, theta)
            first = id(channel) not in seen
            seen.add(id(channel))
            for beta0 in beta0_values:
                for beta1 in beta1_values or [beta0]:
                    points.append(
                        GridPoint(
                            index=len(points),
                            channel_id=channel_id,
                            channel_label=channel_label,
                            channel=channel,
                            H0=H0,
                            H1=H1,
                            beta0=beta0,
                            beta1=beta1,
                            theta=theta,
                            params=variant.params,
                            analytic=analytic,
                            analytic_high_t=analytic_high_t,
                            analytic_low_t=analytic_low_t,
                            primary=first,
                        )
                    )
                    first = False

    logger.info("Scenario '%s' resolved to %d grid points over %d channels", scenario.id, len(points), len(variants))
    return points
