# --- fluctum/models/scenario.py ---
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from fluctum.models.matrices import MatrixLiteral

# Scenario files: one JSON document per batch run, schema version 1


class Grid(BaseModel):
    """Inclusive, evenly spaced grid"""
    model_config = ConfigDict(extra="forbid")

    start: float
    stop: float
    steps: int = Field(..., ge=1)

    @model_validator(mode="after")
    def check_order(self) -> "Grid":
        if self.stop < self.start:
            raise ValueError(f"Grid stop {self.stop} is below start {self.start}")
        return self

    def values(self) -> List[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.steps)]


Scalar = Union[float, Grid]

# Complex amplitude: a plain number or a [re, im] pair
ComplexLiteral = Union[float, Tuple[float, float]]


def grid_values(value: Optional[Scalar]) -> List[float]:
    """Expand a number or grid; None expands to an empty list."""
    if value is None:
        return []
    if isinstance(value, Grid):
        return value.values()
    return [float(value)]


def to_complex(value: ComplexLiteral) -> complex:
    if isinstance(value, tuple):
        return complex(value[0], value[1])
    return complex(value)


class _Ref(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


# Channel references


class AmplitudeDampingRef(_Ref):
    kind: Literal["amplitude_damping_2"]
    p: Scalar


class RotatedAmplitudeDampingRef(_Ref):
    kind: Literal["rotated_amplitude_damping"]
    p: Scalar
    theta: Optional[Scalar] = Field(None, description="Defaults to the scenario theta grid")


class Gad3Ref(_Ref):
    kind: Literal["gad_3"]
    p: Scalar
    q: Scalar


class SplitDamping3Ref(_Ref):
    kind: Literal["split_damping_3"]
    p: Scalar
    q: Scalar


class GeneralizedDampingRef(_Ref):
    """Damped levels, their diagonal amplitudes and [m, n, re, im] transition amplitudes, 1-based"""
    kind: Literal["generalized_damping"]
    dim: int = Field(..., ge=1)
    damped: List[int] = Field(..., alias="I")
    z: List[ComplexLiteral]
    a: List[Tuple[int, int, float, float]] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_lengths(self) -> "GeneralizedDampingRef":
        if len(self.z) != len(self.damped):
            raise ValueError(f"'z' has {len(self.z)} entries for {len(self.damped)} damped levels")
        return self


class CompleteContractionRef(_Ref):
    kind: Literal["complete_contraction"]
    psi: Optional[List[ComplexLiteral]] = None
    dim: Optional[int] = Field(None, ge=1)
    level: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def one_target(self) -> "CompleteContractionRef":
        by_level = self.dim is not None and self.level is not None
        if (self.psi is not None) == by_level:
            raise ValueError("complete_contraction needs either 'psi' or both 'dim' and 'level'")
        return self


class IdentityRef(_Ref):
    kind: Literal["identity"]
    dim: int = Field(..., ge=1)


class DepolarizingRef(_Ref):
    kind: Literal["depolarizing"]
    dim: int = Field(..., ge=1)


class SwapRef(_Ref):
    kind: Literal["swap"]
    dim: int = Field(..., ge=1, description="Levels of each of the two exchanged systems")


class UnitaryMixtureRef(_Ref):
    kind: Literal["unitary_mixture"]
    dim: int = Field(..., ge=1)
    n_unitaries: int = Field(..., ge=1)
    count: int = Field(1, ge=1)


class RandomChannelRef(_Ref):
    kind: Literal["random"]
    dim: int = Field(..., ge=1)
    n_kraus: int = Field(..., ge=1)
    count: int = Field(1, ge=1)


class KrausFileRef(_Ref):
    kind: Literal["kraus_file"]
    path: Path = Field(..., description="Relative paths resolve against the scenario file")


ChannelRef = Annotated[
    Union[
        AmplitudeDampingRef,
        RotatedAmplitudeDampingRef,
        Gad3Ref,
        SplitDamping3Ref,
        GeneralizedDampingRef,
        CompleteContractionRef,
        IdentityRef,
        DepolarizingRef,
        SwapRef,
        UnitaryMixtureRef,
        RandomChannelRef,
        KrausFileRef,
    ],
    Field(discriminator="kind"),
]


# Hamiltonian references


class _FieldHamiltonian(_Ref):
    field: Optional[Tuple[float, float, float]] = None
    magnitude: Optional[float] = Field(None, ge=0, description="Direction comes from the scenario theta grid")

    @model_validator(mode="after")
    def one_form(self) -> "_FieldHamiltonian":
        if (self.field is None) == (self.magnitude is None):
            raise ValueError(f"'{self.kind}' Hamiltonian needs exactly one of 'field' or 'magnitude'")
        return self


class QubitHamiltonianRef(_FieldHamiltonian):
    kind: Literal["qubit"]


class Spin1HamiltonianRef(_FieldHamiltonian):
    kind: Literal["spin1"]


class DiagonalHamiltonianRef(_Ref):
    kind: Literal["diagonal"]
    energies: List[float] = Field(..., min_length=1)


class RandomHamiltonianRef(_Ref):
    kind: Literal["random"]
    dim: int = Field(..., ge=1)
    scale: float = Field(1.0, gt=0)


NamedHamiltonian = Annotated[
    Union[QubitHamiltonianRef, Spin1HamiltonianRef, DiagonalHamiltonianRef, RandomHamiltonianRef],
    Field(discriminator="kind"),
]

HamiltonianRef = Union[NamedHamiltonian, MatrixLiteral]


class Scenario(BaseModel):
    """Batch run description: channels x Hamiltonians x temperatures x field angles"""
    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "version": 1,
                "id": "damping-theta",
                "channel": {"kind": "amplitude_damping_2", "p": 0.5},
                "hamiltonian_initial": {"kind": "qubit", "magnitude": 1.0},
                "beta0": 1.0,
                "theta": {"start": 0.0, "stop": 3.141592653589793, "steps": 7},
            }
        },
    )

    version: Literal[1]
    id: str = Field(..., min_length=1)
    channel: ChannelRef
    hamiltonian_initial: HamiltonianRef
    hamiltonian_final: Optional[HamiltonianRef] = Field(None, description="Defaults to the initial Hamiltonian")
    beta0: Scalar
    beta1: Optional[Scalar] = Field(None, description="Omitted means beta1 = beta0 at every point")
    theta: Optional[Scalar] = None
    outputs: List[Literal["csv", "json"]] = Field(default_factory=lambda: ["csv"], min_length=1)

    @model_validator(mode="after")
    def check_temperatures(self) -> "Scenario":
        for name in ("beta0", "beta1"):
            values = grid_values(getattr(self, name))
            if any(v < 0 for v in values):
                raise ValueError(f"'{name}' must be non-negative")
        return self

    @property
    def final_hamiltonian(self) -> HamiltonianRef:
        return self.hamiltonian_initial if self.hamiltonian_final is None else self.hamiltonian_final

    def uses_theta(self) -> bool:
        refs = [self.hamiltonian_initial, self.final_hamiltonian]
        magnitude_form = any(getattr(ref, "magnitude", None) is not None for ref in refs)
        rotated_default = isinstance(self.channel, RotatedAmplitudeDampingRef) and self.channel.theta is None
        return magnitude_form or rotated_default

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Scenario":
        return cls.model_validate_json(Path(path).read_text())
