"""Production-unit dataset model."""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Dataset(BaseModel):
    """Observed production units (Y_i, X_i) with Y_i > 0 and Z_i = -ln Y_i."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    Y: np.ndarray = Field(..., description="Output, n positive reals")
    X: np.ndarray = Field(..., description="Inputs, n x m with m in {1, 2}")
    input_names: Optional[list[str]] = Field(default=None, description="Column names of X")
    output_name: Optional[str] = Field(default=None, description="Column name of Y")

    @field_validator("Y", mode="before")
    @classmethod
    def _as_vector(cls, value) -> np.ndarray:
        arr = np.asarray(value, dtype=float).reshape(-1)
        if not np.all(np.isfinite(arr)):
            raise ValueError("Y contains non-finite values")
        if np.any(arr <= 0):
            raise ValueError(f"Y must be strictly positive; first offending index {int(np.argmax(arr <= 0))}")
        return arr

    @field_validator("X", mode="before")
    @classmethod
    def _as_matrix(cls, value) -> np.ndarray:
        arr = np.asarray(value, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[1] not in (1, 2):
            raise ValueError(f"X must be n x 1 or n x 2, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("X contains non-finite values")
        return arr

    @model_validator(mode="after")
    def _consistent(self) -> "Dataset":
        if self.X.shape[0] != self.Y.shape[0]:
            raise ValueError(f"X has {self.X.shape[0]} rows but Y has {self.Y.shape[0]}")
        if self.Y.shape[0] < 10:
            raise ValueError(f"need at least 10 production units, got {self.Y.shape[0]}")
        return self

    @property
    def n(self) -> int:
        return int(self.Y.shape[0])

    @property
    def m(self) -> int:
        return int(self.X.shape[1])

    @property
    def Z(self) -> np.ndarray:
        """Log-transformed output -ln Y."""
        return -np.log(self.Y)

    def __str__(self) -> str:
        return f"Dataset(n={self.n}, m={self.m})"
