"""Parameter and result models for the Matsuoka distribution."""

import math
from typing import Literal, Optional

from pydantic import BaseModel, Field, computed_field, model_validator


class IncGammaArgs(BaseModel):
    """Arguments of an incomplete gamma evaluation."""

    shape: float = Field(..., gt=0, allow_inf_nan=False, description="Shape k > 0")
    threshold: float = Field(..., ge=0, allow_inf_nan=False, description="Integration limit t >= 0")

    model_config = {"frozen": True}


class MatsuokaParams(BaseModel):
    """The single shape parameter of M(p)."""

    p: float = Field(..., gt=0, allow_inf_nan=False, description="Shape parameter p > 0")

    model_config = {"frozen": True}

    def __str__(self) -> str:
        return f"M(p={self.p:g})"


class ReliabilityPair(BaseModel):
    """Strength X ~ M(p) against stress Y ~ M(q)."""

    p: float = Field(..., gt=0, allow_inf_nan=False, description="Strength parameter")
    q: float = Field(..., gt=0, allow_inf_nan=False, description="Stress parameter")

    model_config = {"frozen": True}

    @computed_field
    @property
    def s(self) -> float:
        return self.p / (self.p + self.q)


class EntropyOrders(BaseModel):
    """Orders of the Sharma-Mittal family; ``beta`` is only needed for the two-order entropy."""

    alpha: float = Field(..., gt=0, allow_inf_nan=False, description="Order alpha > 0, alpha != 1")
    beta: Optional[float] = Field(default=None, allow_inf_nan=False, description="Order beta != 1")

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _orders_differ_from_one(self) -> "EntropyOrders":
        if self.alpha == 1.0:
            raise ValueError("alpha must differ from 1")
        if self.beta is not None and self.beta == 1.0:
            raise ValueError("beta must differ from 1")
        return self


EntropyKind = Literal["shannon", "differential", "renyi", "tsallis", "sharma_mittal"]


class MleFit(BaseModel):
    """Closed-form estimators of p from an i.i.d. M(p) sample."""

    n: int = Field(..., ge=2, description="Sample size")
    sum_log: float = Field(..., lt=0, description="Sum of ln x_i")
    p_mle: float = Field(..., gt=0, description="Maximum likelihood estimate -3n/(2 sum ln x)")
    p_umvue: float = Field(..., gt=0, description="Unbiased estimate -(3n-2)/(2 sum ln x)")

    @computed_field
    @property
    def mle_bias_factor(self) -> float:
        """E(p_mle)/p = 3n/(3n-2)."""
        return 3 * self.n / (3 * self.n - 2)

    @computed_field
    @property
    def umvue_variance_factor(self) -> float:
        """
        Var(p_umvue)/p^2 = 2/(3n-4).

        With S = -sum ln x_i ~ Gamma(3n/2, scale 1/p), p_umvue = (3n/2 - 1)/S
        and the inverse-gamma moments give p^2/(3n/2 - 2). The often-quoted
        3p^2/(3n-4) overstates it by half.
        """
        return 2 / (3 * self.n - 4)


class ShapeInfo(BaseModel):
    """Shape classification of the density."""

    j_shaped: bool = Field(..., description="True iff p <= 1 (density decreasing on (0,1))")
    mode: Optional[float] = Field(default=None, description="Interior mode when p > 1")
    mode_height: Optional[float] = Field(default=None, description="Density at the mode")
    half_mode_p: float = Field(
        default=1.0 + 1.0 / (2.0 * math.log(2.0)),
        description="The p placing the mode at 1/2; the density is still not symmetric there",
    )


class ClosedFormCheck(BaseModel):
    """One printed-versus-verified comparison."""

    name: str
    printed: float
    implemented: float
    quadrature: float

    @computed_field
    @property
    def printed_error(self) -> float:
        return abs(self.printed - self.quadrature)

    @computed_field
    @property
    def implemented_error(self) -> float:
        return abs(self.implemented - self.quadrature)


class ClosedFormDiagnostics(BaseModel):
    """Transparency report for closed forms whose printed versions disagree with quadrature."""

    p: float
    checks: list[ClosedFormCheck] = Field(default_factory=list)

    def summary(self) -> str:
        lines = [f"=== Closed-form diagnostics for p={self.p:g} ==="]
        for c in self.checks:
            lines.append(
                f"{c.name}: printed={c.printed:.12g} implemented={c.implemented:.12g} "
                f"quadrature={c.quadrature:.12g}"
            )
        return "\n".join(lines)
