"""Fitted frontier and efficiency report models."""

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field

from .smoothing import Bandwidths, SmootherFit, SmootherMethod

SCHEMA_VERSION = 1


class FrontierModel(BaseModel):
    """
    Result of the three-step estimator.

    Holds the first-step regression (at the observations and on per-component
    grids), the method-of-moments shape estimate and the plug-in frontier
    f-hat(x) = exp{3/(2 p-hat) - g-hat(x)}. A model rebuilt from its JSON
    document keeps only what evaluation needs.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    method: SmootherMethod = Field(..., description="loclin, cbs or sbs")
    kernel: str = Field(..., description="Kernel identity")
    bandwidths: Bandwidths = Field(..., description="Bandwidths of the first step")
    bandwidth_policy: Literal["cv", "fixed"] = Field(default="fixed", description="How the bandwidths were chosen")
    p_hat: float = Field(..., gt=0, description="Second-step estimate of p")
    intercept: float = Field(..., description="Constant part of g-hat")
    grids: list[np.ndarray] = Field(..., description="Per-component grids over the training range")
    grid_values: list[np.ndarray] = Field(..., description="g-hat_j on each grid")
    x_min: list[float] = Field(..., description="Per-axis minimum of the training covariates")
    x_max: list[float] = Field(..., description="Per-axis maximum of the training covariates")
    input_names: Optional[list[str]] = Field(default=None, description="Covariate names")

    Y: Optional[np.ndarray] = Field(default=None, description="Training outputs")
    X: Optional[np.ndarray] = Field(default=None, description="Training inputs, n x m")
    fitted: Optional[np.ndarray] = Field(default=None, description="g-hat at the observations")
    residuals: Optional[np.ndarray] = Field(default=None, description="Z_i - g-hat(X_i)")
    smoother_fit: Optional[SmootherFit] = Field(default=None, description="First-step artifact")

    @property
    def m(self) -> int:
        return len(self.grids)

    @computed_field
    @property
    def g0(self) -> float:
        """3/(2 p-hat), the location of -ln R."""
        return 1.5 / self.p_hat

    def in_domain(self, x) -> np.ndarray:
        x = self._as_rows(x)
        lo = np.asarray(self.x_min)
        hi = np.asarray(self.x_max)
        return np.all((x >= lo) & (x <= hi), axis=1)

    def _as_rows(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            x = x.reshape(1, 1)
        elif x.ndim == 1:
            x = x[:, None] if self.m == 1 else x[None, :]
        return x

    def regression(self, x) -> np.ndarray:
        """g-hat at rows of ``x`` from the component grids."""
        from ..core.errors import OutOfDomainError

        x = self._as_rows(x)
        if x.shape[1] != self.m:
            raise OutOfDomainError(f"model has {self.m} input(s), got points with {x.shape[1]}")
        inside = self.in_domain(x)
        if not np.all(inside):
            bad = int(np.argmin(inside))
            raise OutOfDomainError(
                f"point {x[bad].tolist()} lies outside the training range "
                f"{list(zip(self.x_min, self.x_max))}"
            )
        out = np.full(x.shape[0], self.intercept)
        for j, (grid, values) in enumerate(zip(self.grids, self.grid_values)):
            out += np.interp(x[:, j], grid, values)
        return out

    def evaluate(self, x) -> np.ndarray:
        """f-hat at rows of ``x``; raises OutOfDomainError outside the training range."""
        return np.exp(self.g0 - self.regression(x))

    def frontier_at_observations(self) -> np.ndarray:
        """f-hat(X_i) from the exact first-step fitted values."""
        if self.fitted is None:
            raise ValueError("model was rebuilt without training data")
        return np.exp(self.g0 - self.fitted)

    def residual_diagnostics(self) -> dict[str, float]:
        """Mean and variance of the residuals next to the implied 3/(2 p-hat^2)."""
        if self.residuals is None:
            return {}
        return {
            "residual_mean": float(self.residuals.mean()),
            "residual_variance": float(self.residuals.var()),
            "implied_variance": 1.5 / self.p_hat**2,
        }

    def to_document(self, run_config: Optional[dict] = None, version: Optional[str] = None) -> dict:
        """JSON-ready description sufficient to evaluate f-hat without refitting."""
        doc = {
            "schema_version": SCHEMA_VERSION,
            "method": self.method,
            "kernel": self.kernel,
            "bandwidths": list(self.bandwidths.h),
            "bandwidth_policy": self.bandwidth_policy,
            "p_hat": self.p_hat,
            "intercept": self.intercept,
            "training_ranges": [[lo, hi] for lo, hi in zip(self.x_min, self.x_max)],
            "input_names": self.input_names,
            "components": [
                {"grid": grid.tolist(), "values": values.tolist()}
                for grid, values in zip(self.grids, self.grid_values)
            ],
        }
        if version is not None:
            doc["version"] = version
        if run_config is not None:
            doc["run_config"] = run_config
        return doc

    @classmethod
    def from_document(cls, doc: dict) -> "FrontierModel":
        """Rebuild an evaluable model from ``to_document`` output."""
        from ..core.errors import SchemaError

        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaError(f"unsupported model schema_version {version!r}, expected {SCHEMA_VERSION}")
        try:
            ranges = doc["training_ranges"]
            return cls(
                method=doc["method"],
                kernel=doc["kernel"],
                bandwidths=Bandwidths(h=tuple(doc["bandwidths"])),
                bandwidth_policy=doc.get("bandwidth_policy", "fixed"),
                p_hat=doc["p_hat"],
                intercept=doc["intercept"],
                grids=[np.asarray(c["grid"], dtype=float) for c in doc["components"]],
                grid_values=[np.asarray(c["values"], dtype=float) for c in doc["components"]],
                x_min=[float(r[0]) for r in ranges],
                x_max=[float(r[1]) for r in ranges],
                input_names=doc.get("input_names"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed model document: {exc}") from exc

    def summary(self) -> str:
        lines = [
            "=== Frontier fit ===",
            f"Method: {self.method} ({self.kernel} kernel)",
            f"Bandwidths: {self.bandwidths} ({self.bandwidth_policy})",
            f"p_hat: {self.p_hat:.17g}",
        ]
        for key, value in self.residual_diagnostics().items():
            lines.append(f"{key}: {value:.6g}")
        return "\n".join(lines) + "\n"


class EfficiencyReport(BaseModel):
    """Efficiency scores Y_i / f-hat(X_i); values above one are frontier crossings, kept as is."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    scores: np.ndarray = Field(..., description="r-hat_i per unit")
    n_above_one: int = Field(..., ge=0, description="Units above the estimated frontier")

    @property
    def mean(self) -> float:
        return float(self.scores.mean())

    @property
    def standard_error(self) -> float:
        return float(self.scores.std(ddof=1) / np.sqrt(self.scores.shape[0]))

    def summary(self) -> str:
        return (
            f"Efficiency: mean {self.mean:.6g}, min {self.scores.min():.6g}, "
            f"max {self.scores.max():.6g}, above one {self.n_above_one}\n"
        )
