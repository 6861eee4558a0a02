"""
Nadaraya-Watson smooth backfitting (SBS) for two covariates.

Covariates are mapped affinely onto [0, 1]. On a uniform grid of that square
the estimator solves

    g_j(x_j) = g~_j(x_j) - int g_k(x_k) f(x_j, x_k) / f_j(x_j) dx_k - g_0

with g~_j the marginal Nadaraya-Watson smoother, g_0 = Z-bar and every
integral taken by the trapezoid rule on the grid. Kernels are renormalized
per observation so that int_0^1 K_h(x, X_i) dx = 1, which makes the joint
density estimate marginalize exactly to f_j.
"""

import logging
from typing import Optional, Union

import numpy as np

from ...config import settings
from ...models import Bandwidths, SmootherFit
from ..errors import ConvergenceError, DegenerateDensityError, DomainError
from ..kernels import Kernel
from .base import BaseSmoother

logger = logging.getLogger(__name__)

MAX_SWEEPS = 500
SWEEP_TOL = 1e-8
DENSITY_FLOOR = 1e-12
MIN_GRID_SIZE = 32


def trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    """Quadrature weights of the trapezoid rule on an ordered grid."""
    dx = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += dx / 2.0
    w[1:] += dx / 2.0
    return w


class SmoothBackfitGrid:
    """Grid quantities of the SBS system and one backfitting sweep."""

    def __init__(self, U: np.ndarray, Z: np.ndarray, kernel: Kernel, h: tuple[float, float], grid: np.ndarray):
        """
        Args:
            U: n x 2 covariates already in [0, 1]
            Z: Responses
            kernel: Smoothing kernel
            h: Bandwidths in the [0, 1] scale
            grid: Ordered grid on [0, 1]
        """
        self.grid = grid
        self.weights = trapezoid_weights(grid)
        self.n = Z.shape[0]
        self.Zbar = float(Z.mean())
        self.K = []
        for j in range(2):
            raw = kernel.scaled(grid[:, None] - U[None, :, j], h[j])
            mass = self.weights @ raw
            if np.any(mass <= 0.0):
                raise DegenerateDensityError(
                    f"kernel of axis {j + 1} has no mass on the grid; bandwidth {h[j]:.4g} is below the grid spacing"
                )
            self.K.append(raw / mass[None, :])
        self.f = [Kj.mean(axis=1) for Kj in self.K]
        for j, fj in enumerate(self.f):
            if np.any(fj < DENSITY_FLOOR):
                at = float(grid[np.argmax(fj < DENSITY_FLOOR)])
                raise DegenerateDensityError(f"marginal density of axis {j + 1} vanishes at u={at:.4g}")
        self.f12 = self.K[0] @ self.K[1].T / self.n
        self.tilde = [(Kj @ Z) / (self.n * fj) for Kj, fj in zip(self.K, self.f)]

    def sweep(self, g1: np.ndarray, g2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """One Gauss-Seidel pass: update g_1 then g_2."""
        new_g1 = self.tilde[0] - (self.f12 @ (self.weights * g2)) / self.f[0] - self.Zbar
        new_g2 = self.tilde[1] - (self.f12.T @ (self.weights * new_g1)) / self.f[1] - self.Zbar
        return new_g1, new_g2

    def centering(self, gj: np.ndarray, j: int) -> float:
        """int g_j f_j by the trapezoid rule."""
        return float(self.weights @ (gj * self.f[j]))


class SmoothBackfitter(BaseSmoother):
    """Additive fit Z-bar + g_1(x_1) + g_2(x_2) by Nadaraya-Watson smooth backfitting."""

    method = "sbs"
    n_inputs = 2
    min_obs = 5

    def __init__(
        self,
        kernel: Union[Kernel, str] = "epanechnikov",
        grid_size: Optional[int] = None,
        sbs_grid_size: Optional[int] = None,
    ):
        super().__init__(kernel, grid_size=grid_size)
        self.sbs_grid_size = sbs_grid_size or settings.sbs_grid_size
        if self.sbs_grid_size < MIN_GRID_SIZE:
            raise DomainError(f"SBS grid needs at least {MIN_GRID_SIZE} points, got {self.sbs_grid_size}")

    def fit(self, X, Z, h) -> SmootherFit:
        X, Z, h = self._prepare(X, Z, h)
        lo, hi = X.min(axis=0), X.max(axis=0)
        span = hi - lo
        if np.any(span <= 0):
            raise DomainError("SBS needs non-constant covariates")
        U = (X - lo) / span
        h_unit = (h.h[0] / span[0], h.h[1] / span[1])
        grid = np.linspace(0.0, 1.0, self.sbs_grid_size)
        system = SmoothBackfitGrid(U, Z, self.kernel, h_unit, grid)

        g1 = np.zeros_like(grid)
        g2 = np.zeros_like(grid)
        update = np.inf
        for sweep in range(1, MAX_SWEEPS + 1):
            new_g1, new_g2 = system.sweep(g1, g2)
            update = float(max(np.max(np.abs(new_g1 - g1)), np.max(np.abs(new_g2 - g2))))
            g1, g2 = new_g1, new_g2
            if update < SWEEP_TOL:
                break
        else:
            raise ConvergenceError(
                f"smooth backfitting did not converge in {MAX_SWEEPS} sweeps",
                iterations=MAX_SWEEPS,
                last_update=update,
            )

        components = [np.interp(U[:, 0], grid, g1), np.interp(U[:, 1], grid, g2)]
        grids_unit = [grid, grid]
        grid_values = [g1, g2]
        if self.grid_size != self.sbs_grid_size:
            eval_grid = np.linspace(0.0, 1.0, self.grid_size)
            grid_values = [np.interp(eval_grid, grid, g) for g in (g1, g2)]
            grids_unit = [eval_grid, eval_grid]
        logger.debug("sbs fit: h=%s sweeps=%d update=%.3g", h, sweep, update)
        return SmootherFit(
            method=self.method,
            kernel=self.kernel.name,
            bandwidths=h,
            fitted=system.Zbar + components[0] + components[1],
            components=components,
            intercept=system.Zbar,
            grids=[lo[j] + grids_unit[j] * span[j] for j in range(2)],
            grid_values=grid_values,
            iterations=sweep,
            update_norm=update,
            diagnostics={
                "centering_1": system.centering(g1, 0),
                "centering_2": system.centering(g2, 1),
                "x_min_1": float(lo[0]),
                "x_max_1": float(hi[0]),
                "x_min_2": float(lo[1]),
                "x_max_2": float(hi[1]),
            },
        )


def sbs_fit(
    X,
    Z,
    kernel: Kernel,
    h: Union[Bandwidths, tuple[float, float]],
    grid_size: Optional[int] = None,
) -> SmootherFit:
    """
    Smooth backfitting estimate on a ``grid_size`` x ``grid_size`` grid.

    Raises:
        ConvergenceError: after 500 sweeps without a sup-norm update below 1e-8
        DegenerateDensityError: if a marginal density estimate drops below 1e-12 on the grid
    """
    return SmoothBackfitter(kernel, sbs_grid_size=grid_size).fit(X, Z, h)
