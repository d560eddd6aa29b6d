# --- fluctum/models/matrices.py ---
from pathlib import Path
from typing import List, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fluctum.utils.error_handling import DimensionMismatchError

# Wire formats for matrices and Kraus families


class MatrixLiteral(BaseModel):
    """Dense complex matrix, row-major real and imaginary parts"""
    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {"rows": 2, "cols": 2, "re": [0, 1, 1, 0], "im": [0, 0, 0, 0]}
        },
    )

    rows: int = Field(..., ge=1)
    cols: int = Field(..., ge=1)
    re: List[float]
    im: List[float] = Field(default_factory=list, description="Empty means a real matrix")

    @model_validator(mode="after")
    def check_lengths(self) -> "MatrixLiteral":
        size = self.rows * self.cols
        if len(self.re) != size:
            raise ValueError(f"'re' has {len(self.re)} entries, expected rows*cols = {size}")
        if self.im and len(self.im) != size:
            raise ValueError(f"'im' has {len(self.im)} entries, expected rows*cols = {size}")
        return self

    def to_array(self) -> np.ndarray:
        real = np.asarray(self.re, dtype=float)
        imag = np.asarray(self.im, dtype=float) if self.im else np.zeros_like(real)
        return (real + 1j * imag).reshape(self.rows, self.cols)

    @classmethod
    def from_array(cls, array) -> "MatrixLiteral":
        array = np.asarray(array, dtype=np.complex128)
        if array.ndim != 2:
            raise DimensionMismatchError(f"Matrix literal needs a 2-D array, got shape {array.shape}")
        flat = array.reshape(-1)
        return cls(
            rows=array.shape[0],
            cols=array.shape[1],
            re=[float(x) for x in flat.real],
            im=[float(x) for x in flat.imag],
        )


class ChannelFile(BaseModel):
    """Kraus family of an N_A -> N_B channel"""
    model_config = ConfigDict(extra="forbid")

    dim_in: int = Field(..., ge=1)
    dim_out: int = Field(..., ge=1)
    kraus: List[MatrixLiteral] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_shapes(self) -> "ChannelFile":
        for index, K in enumerate(self.kraus):
            if (K.rows, K.cols) != (self.dim_out, self.dim_in):
                raise ValueError(
                    f"kraus[{index}] is {K.rows}x{K.cols}, expected {self.dim_out}x{self.dim_in}"
                )
        return self

    def to_arrays(self) -> List[np.ndarray]:
        return [K.to_array() for K in self.kraus]

    @classmethod
    def load(cls, path: Union[str, Path]) -> "ChannelFile":
        return cls.model_validate_json(Path(path).read_text())


class BlochPayload(BaseModel):
    """Bloch vector as a JSON real array with its dimension"""
    dim: int = Field(..., ge=2)
    components: List[float]

    @field_validator("components")
    @classmethod
    def finite(cls, value: List[float]) -> List[float]:
        if not all(np.isfinite(value)):
            raise ValueError("Bloch components must be finite")
        return value
