"""Monte Carlo study models."""

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .dataset import Dataset

DgpKind = Literal["dgp_i", "dgp_ii"]


class DgpSpec(BaseModel):
    """One data generating process draw."""

    kind: DgpKind = Field(..., description="dgp_i (one input) or dgp_ii (two inputs)")
    p: float = Field(..., gt=0, allow_inf_nan=False, description="Shape of the inefficiency law")
    n: int = Field(..., ge=10, description="Sample size")
    seed: int = Field(default=0, ge=0, lt=2**64, description="64-bit seed")

    model_config = {"frozen": True}

    @property
    def m(self) -> int:
        return 1 if self.kind == "dgp_i" else 2


class ReplicaRecord(BaseModel):
    """Outcome of one replica; failures carry ``error`` and no numbers."""

    replica: int = Field(..., ge=0, description="Replica index r")
    seed: int = Field(..., description="Seed derived for this replica")
    ase_g: Optional[float] = Field(default=None, description="ASE of g-hat")
    ase_f: Optional[float] = Field(default=None, description="ASE of f-hat")
    ase_g1: Optional[float] = Field(default=None, description="ASE of g-hat_1 (m=2)")
    ase_g2: Optional[float] = Field(default=None, description="ASE of g-hat_2 (m=2)")
    p_hat: Optional[float] = Field(default=None, description="Feasible estimate of p")
    p_tilde: Optional[float] = Field(default=None, description="Infeasible estimate from the true errors")
    max_abs_f: Optional[float] = Field(default=None, description="Max |f-hat - f| at interior design points")
    bandwidths: Optional[str] = Field(default=None, description="Bandwidths used")
    error: Optional[str] = Field(default=None, description="Error message if the replica failed")

    @property
    def ok(self) -> bool:
        return self.error is None


def _mean(values: list[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


class SimReport(BaseModel):
    """Per-cell replica records and the table-shaped aggregates."""

    cell: int = Field(..., ge=0, description="Cell index in the study grid")
    dgp: DgpKind = Field(..., description="Data generating process")
    p: float = Field(..., description="True p")
    n: int = Field(..., description="Sample size")
    method: str = Field(..., description="Smoothing method")
    kernel: str = Field(..., description="Kernel")
    bandwidth_policy: str = Field(..., description="cv or the fixed bandwidths")
    replicas: list[ReplicaRecord] = Field(default_factory=list, description="Records in replica order")
    n_replicas: int = Field(..., ge=1, description="N")
    n_failed: int = Field(default=0, ge=0, description="Failed replicas")
    L_g: Optional[float] = Field(default=None, description="MASE of g-hat")
    L_f: Optional[float] = Field(default=None, description="MASE of f-hat")
    L_g1: Optional[float] = Field(default=None, description="MASE of g-hat_1")
    L_g2: Optional[float] = Field(default=None, description="MASE of g-hat_2")
    mean_p_hat: Optional[float] = Field(default=None, description="Mean of p-hat")
    var_p_hat: Optional[float] = Field(default=None, description="Sample variance (ddof=1) of p-hat")
    q05_p_hat: Optional[float] = Field(default=None, description="Type-7 0.05 quantile of p-hat")
    q95_p_hat: Optional[float] = Field(default=None, description="Type-7 0.95 quantile of p-hat")
    mean_p_tilde: Optional[float] = Field(default=None, description="Mean of p-tilde")
    wall_clock: float = Field(default=0.0, description="Seconds spent on the cell")

    @classmethod
    def from_records(cls, records: list[ReplicaRecord], **cell) -> "SimReport":
        records = sorted(records, key=lambda r: r.replica)
        ok = [r for r in records if r.ok]
        p_hat = np.array([r.p_hat for r in ok], dtype=float)

        def column(name: str) -> list[float]:
            return [getattr(r, name) for r in ok if getattr(r, name) is not None]

        return cls(
            replicas=records,
            n_replicas=len(records),
            n_failed=len(records) - len(ok),
            L_g=_mean(column("ase_g")),
            L_f=_mean(column("ase_f")),
            L_g1=_mean(column("ase_g1")),
            L_g2=_mean(column("ase_g2")),
            mean_p_hat=float(p_hat.mean()) if p_hat.size else None,
            var_p_hat=float(p_hat.var(ddof=1)) if p_hat.size > 1 else None,
            q05_p_hat=float(np.quantile(p_hat, 0.05, method="linear")) if p_hat.size else None,
            q95_p_hat=float(np.quantile(p_hat, 0.95, method="linear")) if p_hat.size else None,
            mean_p_tilde=_mean(column("p_tilde")),
            **cell,
        )

    @property
    def failure_rate(self) -> float:
        return self.n_failed / self.n_replicas

    def p_hat_values(self) -> np.ndarray:
        return np.array([r.p_hat for r in self.replicas if r.ok], dtype=float)

    def recompute_gap(self) -> float:
        """Largest gap between a stored MASE and the mean of its replica vector."""
        gaps = []
        for name, stored in (("ase_g", self.L_g), ("ase_f", self.L_f), ("ase_g1", self.L_g1), ("ase_g2", self.L_g2)):
            values = [getattr(r, name) for r in self.replicas if r.ok and getattr(r, name) is not None]
            if stored is not None and values:
                gaps.append(abs(stored - float(np.mean(values))))
        return max(gaps, default=0.0)

    def aggregate_row(self) -> dict:
        """Table-shaped aggregate row; wall clock is left out so reruns stay byte-identical."""
        return {
            "cell": self.cell,
            "dgp": self.dgp,
            "p": self.p,
            "n": self.n,
            "method": self.method,
            "kernel": self.kernel,
            "bandwidth": self.bandwidth_policy,
            "N": self.n_replicas,
            "failed": self.n_failed,
            "L_f": self.L_f,
            "L_g": self.L_g,
            "L_g1": self.L_g1,
            "L_g2": self.L_g2,
            "mean_p_hat": self.mean_p_hat,
            "var_p_hat": self.var_p_hat,
            "q05_p_hat": self.q05_p_hat,
            "q95_p_hat": self.q95_p_hat,
            "mean_p_tilde": self.mean_p_tilde,
        }

    def summary(self) -> str:
        def fmt(v):
            return "n/a" if v is None else f"{v:.4f}"

        return (
            f"{self.dgp} p={self.p:g} n={self.n} {self.method}: N={self.n_replicas} failed={self.n_failed} "
            f"L(f)={fmt(self.L_f)} L(g)={fmt(self.L_g)} mean(p)={fmt(self.mean_p_hat)} "
            f"var(p)={fmt(self.var_p_hat)} Q.05={fmt(self.q05_p_hat)} Q.95={fmt(self.q95_p_hat)}"
        )


class GeneratedData(BaseModel):
    """A simulated sample together with the latent truth used for scoring."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    spec: DgpSpec = Field(..., description="Generating specification")
    dataset: Dataset = Field(..., description="Observed (Y, X)")
    frontier: np.ndarray = Field(..., description="True f(X_i)")
    regression: np.ndarray = Field(..., description="True g(X_i) = 3/(2p) - ln f(X_i)")
    errors: np.ndarray = Field(..., description="True eps_i = Z_i - g(X_i)")
    components: list[np.ndarray] = Field(default_factory=list, description="True centered g_j(X_ij), m=2")
