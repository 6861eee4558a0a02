"""Second-order symmetric kernels used by the smoothers."""

import logging
import math
from typing import Literal, Optional, Sequence

import numpy as np
from scipy import integrate, stats

from .errors import DomainError

logger = logging.getLogger(__name__)

KernelKind = Literal["epanechnikov", "gaussian", "custom"]

NORMALIZATION_TOL = 1e-6


class Kernel:
    """
    A kernel K: R -> [0, inf) with K(u) = K(-u) and unit integral.

    Epanechnikov is compactly supported on [-1, 1] and Lipschitz; the Gaussian
    has unbounded support. A custom kernel is given by a table of (u, K(u))
    values on u >= 0, mirrored and linearly interpolated, and is checked for
    unit mass by quadrature at construction.
    """

    def __init__(
        self,
        kind: KernelKind = "epanechnikov",
        table_u: Optional[Sequence[float]] = None,
        table_k: Optional[Sequence[float]] = None,
    ):
        self.kind = kind
        if kind == "custom":
            if table_u is None or table_k is None:
                raise DomainError("custom kernel needs table_u and table_k")
            u = np.asarray(table_u, dtype=float)
            k = np.asarray(table_k, dtype=float)
            if u.ndim != 1 or u.shape != k.shape or u.size < 2:
                raise DomainError("custom kernel table must be two equal-length 1-d sequences")
            if u[0] != 0.0 or np.any(np.diff(u) <= 0):
                raise DomainError("custom kernel abscissae must start at 0 and increase")
            if np.any(k < 0):
                raise DomainError("custom kernel values must be non-negative")
            self._table_u, self._table_k = u, k
            self.radius = float(u[-1])
            breaks = sorted({0.0, *u[1:-1], *(-u[1:-1])})
            mass, _ = integrate.quad(self, -self.radius, self.radius, points=breaks, limit=500)
            if abs(mass - 1.0) > NORMALIZATION_TOL:
                raise DomainError(f"custom kernel integrates to {mass:.8g}, not 1")
        elif kind == "epanechnikov":
            self.radius = 1.0
        elif kind == "gaussian":
            self.radius = math.inf
        else:
            raise DomainError(f"unknown kernel kind {kind!r}")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "epanechnikov":
            out = 0.75 * np.maximum(0.0, 1.0 - u * u)
        elif self.kind == "gaussian":
            out = stats.norm.pdf(u)
        else:
            out = np.interp(np.abs(u), self._table_u, self._table_k, right=0.0)
        return float(out) if out.ndim == 0 else out

    def scaled(self, u, h: float):
        """K_h(u) = K(u/h)/h."""
        return self(np.asarray(u, dtype=float) / h) / h

    @property
    def compact(self) -> bool:
        return math.isfinite(self.radius)

    @property
    def name(self) -> str:
        return self.kind

    def _integral(self, fn) -> float:
        lim = self.radius if self.compact else np.inf
        value, _ = integrate.quad(fn, -lim, lim, limit=500)
        return float(value)

    def roughness(self) -> float:
        """v_0 = int K^2."""
        return self._integral(lambda u: self(u) ** 2)

    def second_moment(self) -> float:
        """mu_2 = int u^2 K."""
        return self._integral(lambda u: u * u * self(u))

    def __repr__(self) -> str:
        return f"Kernel({self.kind!r})"


def get_kernel(kind: str) -> Kernel:
    """Kernel by name."""
    return Kernel(kind)  # type: ignore[arg-type]
