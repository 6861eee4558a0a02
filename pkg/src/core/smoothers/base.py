"""Base smoother class for the first-step regression estimators."""

import math
from abc import ABC, abstractmethod
from typing import Optional, Union

import numpy as np

from ...config import settings
from ...models import Bandwidths, SmootherFit, SmootherMethod
from ..errors import DomainError
from ..kernels import Kernel, get_kernel


class BaseSmoother(ABC):
    """Abstract base class for the loclin, cbs and sbs smoothers."""

    method: SmootherMethod
    n_inputs: int
    min_obs: int = 3

    def __init__(
        self,
        kernel: Union[Kernel, str] = "epanechnikov",
        grid_size: Optional[int] = None,
    ):
        """
        Initialize the smoother.

        Args:
            kernel: Kernel instance or name
            grid_size: Points per component evaluation grid (defaults to settings)
        """
        self.kernel = kernel if isinstance(kernel, Kernel) else get_kernel(kernel)
        self.grid_size = grid_size or settings.eval_grid_size

    def _prepare(self, X, Z, h: Union[Bandwidths, float, tuple]) -> tuple[np.ndarray, np.ndarray, Bandwidths]:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        Z = np.asarray(Z, dtype=float).reshape(-1)
        if X.shape[1] != self.n_inputs:
            raise DomainError(f"{self.method} needs {self.n_inputs} covariate(s), got {X.shape[1]}")
        if X.shape[0] != Z.shape[0]:
            raise DomainError(f"X has {X.shape[0]} rows but Z has {Z.shape[0]}")
        if Z.shape[0] < self.min_obs:
            raise DomainError(f"{self.method} needs at least {self.min_obs} observations, got {Z.shape[0]}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Z))):
            raise DomainError("smoother inputs must be finite")
        if not isinstance(h, Bandwidths):
            try:
                h = Bandwidths(h=h)
            except ValueError as exc:
                raise DomainError(f"invalid bandwidths {h!r}") from exc
        if h.m != self.n_inputs:
            raise DomainError(f"{self.method} needs {self.n_inputs} bandwidth(s), got {h.m}")
        return X, Z, h

    def _grid(self, column: np.ndarray) -> np.ndarray:
        return np.linspace(column.min(), column.max(), self.grid_size)

    @abstractmethod
    def fit(self, X, Z, h) -> SmootherFit:
        """Fit the regression of Z on X."""
        pass

    def predict_left_out(self, X: np.ndarray, Z: np.ndarray, h: Bandwidths, i: int) -> float:
        """g-hat_{-i}(X_i): fit without observation i and predict at it."""
        keep = np.arange(Z.shape[0]) != i
        fit = self.fit(X[keep], Z[keep], h)
        return float(fit.evaluate(X[i : i + 1])[0])

    def cv_score(self, X, Z, h) -> float:
        """Leave-one-out CV(h) = n^-1 sum (Z_i - g-hat_{-i}(X_i))^2, summed in index order."""
        X, Z, h = self._prepare(X, Z, h)
        errors = [(Z[i] - self.predict_left_out(X, Z, h, i)) ** 2 for i in range(Z.shape[0])]
        return math.fsum(errors) / Z.shape[0]
