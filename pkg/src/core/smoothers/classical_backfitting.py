"""Classical backfitting (CBS) with local linear component smoothers, m = 2."""

import logging
from typing import Literal, Optional, Union

import numpy as np

from ...models import Bandwidths, SmootherFit
from ..errors import ConvergenceError, DomainError, SingularDesignError
from ..kernels import Kernel
from .base import BaseSmoother
from .local_linear import equivalent_kernel, smoother_matrix

logger = logging.getLogger(__name__)

CbsMode = Literal["explicit", "iterative"]

MAX_SWEEPS = 500
SWEEP_TOL = 1e-10
POWER_ITER_MAX = 200
POWER_ITER_TOL = 1e-10
SOLVE_COND_LIMIT = 1e12


def centered_smoother(x, kernel: Kernel, h: float) -> np.ndarray:
    """S* = (I - 11'/n) S: every output vector has mean zero."""
    S = smoother_matrix(x, kernel, h)
    return S - S.mean(axis=0, keepdims=True)


def spectral_norm_estimate(M: np.ndarray, seed: int = 0) -> float:
    """Largest singular value of M by power iteration on M'M."""
    v = np.random.default_rng(seed).standard_normal(M.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(POWER_ITER_MAX):
        u = M.T @ (M @ v)
        norm_u = np.linalg.norm(u)
        if norm_u == 0.0:
            return 0.0
        v = u / norm_u
        new_sigma = float(np.sqrt(norm_u))
        if abs(new_sigma - sigma) <= POWER_ITER_TOL * max(new_sigma, 1.0):
            return new_sigma
        sigma = new_sigma
    return sigma


def backfitting_norms(S1_star: np.ndarray, S2_star: np.ndarray) -> dict[str, float]:
    """Matrix norms of S1* S2*; any of them below one makes the explicit solution unique."""
    M = S1_star @ S2_star
    return {
        "norm_spectral": spectral_norm_estimate(M),
        "norm_1": float(np.linalg.norm(M, 1)),
        "norm_inf": float(np.linalg.norm(M, np.inf)),
        "norm_fro": float(np.linalg.norm(M, "fro")),
    }


def backfitting_matrices(S1_star: np.ndarray, S2_star: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """W_1 = I - (I - S1*S2*)^-1 (I - S1*) and its mirror W_2."""
    eye = np.eye(S1_star.shape[0])
    W1 = eye - np.linalg.solve(eye - S1_star @ S2_star, eye - S1_star)
    W2 = eye - np.linalg.solve(eye - S2_star @ S1_star, eye - S2_star)
    return W1, W2


class ClassicalBackfitter(BaseSmoother):
    """Additive fit Z-bar + g_1(x_1) + g_2(x_2) by classical backfitting."""

    method = "cbs"
    n_inputs = 2
    min_obs = 5

    def __init__(
        self,
        kernel: Union[Kernel, str] = "epanechnikov",
        mode: CbsMode = "explicit",
        grid_size: Optional[int] = None,
    ):
        super().__init__(kernel, grid_size=grid_size)
        if mode not in ("explicit", "iterative"):
            raise DomainError(f"unknown CBS mode {mode!r}")
        self.mode = mode

    def _solve_explicit(self, S1s, S2s, Zs) -> tuple[np.ndarray, np.ndarray, dict[str, float]]:
        norms = backfitting_norms(S1s, S2s)
        if min(norms.values()) >= 1.0:
            raise DomainError(
                "explicit backfitting needs ||S1* S2*|| < 1; smallest computed norm is "
                f"{min(norms.values()):.4g}"
            )
        eye = np.eye(Zs.shape[0])
        A1 = eye - S1s @ S2s
        A2 = eye - S2s @ S1s
        for A in (A1, A2):
            if np.linalg.cond(A) > SOLVE_COND_LIMIT:
                raise SingularDesignError("I - S_j* S_k* is numerically singular")
        g1 = Zs - np.linalg.solve(A1, Zs - S1s @ Zs)
        g2 = Zs - np.linalg.solve(A2, Zs - S2s @ Zs)
        return g1, g2, norms

    def _solve_iterative(self, S1s, S2s, Zs) -> tuple[np.ndarray, np.ndarray, int, float]:
        g1 = np.zeros_like(Zs)
        g2 = np.zeros_like(Zs)
        update = np.inf
        for sweep in range(1, MAX_SWEEPS + 1):
            new_g1 = S1s @ (Zs - g2)
            new_g2 = S2s @ (Zs - new_g1)
            update = max(np.max(np.abs(new_g1 - g1)), np.max(np.abs(new_g2 - g2)))
            g1, g2 = new_g1, new_g2
            if update < SWEEP_TOL:
                return g1, g2, sweep, float(update)
        raise ConvergenceError(
            f"classical backfitting did not converge in {MAX_SWEEPS} sweeps",
            iterations=MAX_SWEEPS,
            last_update=float(update),
        )

    def _components(self, X, Z, h: Bandwidths):
        Zbar = float(Z.mean())
        Zs = Z - Zbar
        S1s = centered_smoother(X[:, 0], self.kernel, h.h[0])
        S2s = centered_smoother(X[:, 1], self.kernel, h.h[1])
        if self.mode == "explicit":
            g1, g2, diagnostics = self._solve_explicit(S1s, S2s, Zs)
            iterations, update = 0, 0.0
        else:
            g1, g2, iterations, update = self._solve_iterative(S1s, S2s, Zs)
            diagnostics = {}
        return Zbar, Zs, g1, g2, iterations, update, diagnostics

    def _offdesign(self, X, Zs, g1, g2, h: Bandwidths):
        """Evaluators z -> w_{j,z}' r_j - c_j with partial residuals r_j, consistent at the observations."""
        partials = [Zs - g2, Zs - g1]
        centers = [
            float(np.mean(smoother_matrix(X[:, j], self.kernel, h.h[j]) @ partials[j])) for j in range(2)
        ]

        def component(j: int, z) -> np.ndarray:
            return equivalent_kernel(X[:, j], z, self.kernel, h.h[j]) @ partials[j] - centers[j]

        return component

    def fit(self, X, Z, h) -> SmootherFit:
        X, Z, h = self._prepare(X, Z, h)
        Zbar, Zs, g1, g2, iterations, update, diagnostics = self._components(X, Z, h)
        component = self._offdesign(X, Zs, g1, g2, h)
        grids = [self._grid(X[:, j]) for j in range(2)]
        grid_values = [component(j, grids[j]) for j in range(2)]
        diagnostics["component_mean_1"] = float(g1.mean())
        diagnostics["component_mean_2"] = float(g2.mean())
        logger.debug("cbs fit (%s): h=%s sweeps=%d", self.mode, h, iterations)
        return SmootherFit(
            method=self.method,
            kernel=self.kernel.name,
            bandwidths=h,
            fitted=Zbar + g1 + g2,
            components=[g1, g2],
            intercept=Zbar,
            grids=grids,
            grid_values=grid_values,
            iterations=iterations,
            update_norm=update,
            diagnostics=diagnostics,
        )

    def predict_left_out(self, X, Z, h, i) -> float:
        keep = np.arange(Z.shape[0]) != i
        Xs, Zk = X[keep], Z[keep]
        Zbar, Zs, g1, g2, _, _, _ = self._components(Xs, Zk, h)
        component = self._offdesign(Xs, Zs, g1, g2, h)
        return Zbar + float(component(0, X[i, 0])[0]) + float(component(1, X[i, 1])[0])


def cbs_fit(
    X,
    Z,
    kernel: Kernel,
    h: Union[Bandwidths, tuple[float, float]],
    mode: CbsMode = "explicit",
    grid_size: Optional[int] = None,
) -> SmootherFit:
    """
    Classical backfitting estimate g-hat = Z-bar + (W_1 + W_2) Z* at the observations.

    Raises:
        DomainError: explicit mode when no norm of S1* S2* is below one
        SingularDesignError: when I - S1* S2* is numerically singular
        ConvergenceError: iterative mode after 500 sweeps
    """
    return ClassicalBackfitter(kernel, mode=mode, grid_size=grid_size).fit(X, Z, h)
