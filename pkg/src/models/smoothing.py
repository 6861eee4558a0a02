"""Smoother configuration and result models."""

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

SmootherMethod = Literal["loclin", "cbs", "sbs"]


class Bandwidths(BaseModel):
    """One positive bandwidth per covariate, in covariate units."""

    h: tuple[float, ...] = Field(..., min_length=1, max_length=2, description="Bandwidths h_1..h_m")

    model_config = {"frozen": True}

    @field_validator("h", mode="before")
    @classmethod
    def _positive(cls, value):
        if isinstance(value, (int, float)):
            value = (value,)
        values = tuple(float(v) for v in value)
        if not all(np.isfinite(v) and v > 0 for v in values):
            raise ValueError(f"bandwidths must be finite and > 0, got {values}")
        return values

    @property
    def m(self) -> int:
        return len(self.h)

    def product(self) -> float:
        return float(np.prod(self.h))

    def __str__(self) -> str:
        return ",".join(f"{v:.6g}" for v in self.h)


class DesignMatrixSlice(BaseModel):
    """Local design of covariate j at point z and its equivalent-kernel row."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    z: float = Field(..., description="Evaluation point")
    design: np.ndarray = Field(..., description="A_z: n x 2, intercept and X - z")
    weights: np.ndarray = Field(..., description="Diagonal of D_z, kernel weights K_h(X - z)")
    equivalent_kernel: np.ndarray = Field(..., description="w_z, length n")

    def reproducing_residuals(self) -> tuple[float, float]:
        """(sum w - 1, sum w (X - z)); both vanish for a local linear row."""
        w = self.equivalent_kernel
        return float(w.sum() - 1.0), float(w @ self.design[:, 1])


class SmootherFit(BaseModel):
    """Fitted regression function of a first-step smoother."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    method: SmootherMethod = Field(..., description="loclin, cbs or sbs")
    kernel: str = Field(..., description="Kernel identity")
    bandwidths: Bandwidths = Field(..., description="Bandwidths used")
    fitted: np.ndarray = Field(..., description="g-hat at the n observation points")
    components: list[np.ndarray] = Field(..., description="g-hat_j at the observation points")
    intercept: float = Field(default=0.0, description="Z-bar when m > 1, 0 for loclin")
    grids: list[np.ndarray] = Field(default_factory=list, description="Per-component grids, covariate units")
    grid_values: list[np.ndarray] = Field(default_factory=list, description="g-hat_j on each grid")
    eval_points: Optional[np.ndarray] = Field(default=None, description="Requested evaluation points")
    eval_values: Optional[np.ndarray] = Field(default=None, description="g-hat at eval_points")
    iterations: int = Field(default=0, description="Backfitting sweeps")
    update_norm: float = Field(default=0.0, description="Final update norm of the backfitting loop")
    diagnostics: dict[str, float] = Field(default_factory=dict, description="Method-specific numbers")

    @property
    def m(self) -> int:
        return len(self.components)

    def evaluate(self, x) -> np.ndarray:
        """Intercept plus linearly interpolated components at rows of ``x``."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None] if self.m == 1 else x[None, :]
        out = np.full(x.shape[0], self.intercept)
        for j, (grid, values) in enumerate(zip(self.grids, self.grid_values)):
            out += np.interp(x[:, j], grid, values)
        return out

    def summary(self) -> str:
        return (
            f"=== {self.method} fit ===\n"
            f"Kernel: {self.kernel}\n"
            f"Bandwidths: {self.bandwidths}\n"
            f"Intercept: {self.intercept:.6g}\n"
            f"Iterations: {self.iterations} (update norm {self.update_norm:.3g})\n"
        )
