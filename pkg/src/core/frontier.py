"""
Three-step production frontier estimator.

With Y = f(X) R and R ~ M(p), the log output Z = -ln Y satisfies
Z = g(X) + eps where g(x) = 3/(2p) - ln f(x) and E(eps | X) = 0. The steps are:

1. fit g by a nonparametric smoother (loclin for one input, cbs or sbs for two);
2. estimate p by the method of moments on the residuals,
   p-hat = sqrt(3n / (2 sum eps-hat^2));
3. plug in: f-hat(x) = exp{3/(2 p-hat) - g-hat(x)}.
"""

import logging
import math
from typing import Literal, Optional, Sequence, Union

import numpy as np

from ..models import Bandwidths, Dataset, EfficiencyReport, FrontierModel, SmootherFit, SmootherMethod
from .errors import DomainError, SingularDesignError, ZeroResidualError
from .kernels import Kernel, get_kernel
from .smoothers import ClassicalBackfitter, cv_bandwidth, make_smoother

logger = logging.getLogger(__name__)

BandwidthPolicy = Union[Literal["cv"], Bandwidths, float, Sequence[float]]

# sums of squares below (n * (ZERO_RESIDUAL_ULPS * eps * scale)^2) count as an exact fit
ZERO_RESIDUAL_ULPS = 64


def _is_zero_fit(residuals: np.ndarray, scale: float) -> bool:
    tol = residuals.shape[0] * (ZERO_RESIDUAL_ULPS * np.finfo(float).eps * max(scale, 1.0)) ** 2
    return math.fsum(residuals**2) <= tol


def moment_estimate(residuals) -> float:
    """sqrt(3n / (2 sum e_i^2))."""
    e = np.asarray(residuals, dtype=float).reshape(-1)
    ss = math.fsum(e**2)
    if ss <= 0.0:
        raise ZeroResidualError("sum of squared residuals is zero; p is not identifiable")
    return math.sqrt(3.0 * e.shape[0] / (2.0 * ss))


def fit_p_oracle(residuals) -> float:
    """
    Infeasible estimator p-tilde from the true errors.

    Raises:
        ZeroResidualError: if every residual is zero
    """
    return moment_estimate(residuals)


def _default_method(m: int) -> SmootherMethod:
    return "loclin" if m == 1 else "cbs"


def _check_method(method: SmootherMethod, m: int) -> None:
    allowed = ("loclin",) if m == 1 else ("cbs", "sbs")
    if method not in allowed:
        raise DomainError(f"method {method!r} needs m={1 if method == 'loclin' else 2}; data has m={m}")


def _first_step(
    data: Dataset,
    method: SmootherMethod,
    kernel: Kernel,
    h: Bandwidths,
    cbs_mode: Optional[str],
    sbs_grid_size: Optional[int],
    grid_size: Optional[int],
) -> SmootherFit:
    smoother = make_smoother(method, kernel, cbs_mode=cbs_mode, sbs_grid_size=sbs_grid_size, grid_size=grid_size)
    try:
        return smoother.fit(data.X, data.Z, h)
    except SingularDesignError:
        raise
    except DomainError as exc:
        if not (isinstance(smoother, ClassicalBackfitter) and smoother.mode == "explicit"):
            raise
        logger.warning("explicit backfitting unavailable (%s); falling back to iterative sweeps", exc)
        fallback = ClassicalBackfitter(kernel, mode="iterative", grid_size=smoother.grid_size)
        return fallback.fit(data.X, data.Z, h)


def fit_frontier(
    data: Dataset,
    method: Optional[SmootherMethod] = None,
    kernel: Union[Kernel, str] = "epanechnikov",
    bandwidth: BandwidthPolicy = "cv",
    cbs_mode: Optional[str] = None,
    sbs_grid_size: Optional[int] = None,
    search_grid: Optional[Sequence[Bandwidths]] = None,
    grid_size: Optional[int] = None,
) -> FrontierModel:
    """
    Run the three steps on a dataset.

    Args:
        data: Production units
        method: loclin (m=1), cbs or sbs (m=2); defaults to loclin / cbs
        kernel: Kernel instance or name
        bandwidth: "cv" for leave-one-out selection, or fixed bandwidths
        cbs_mode: explicit or iterative classical backfitting (defaults to settings)
        sbs_grid_size: Grid points per axis for smooth backfitting
        search_grid: CV candidates (defaults to the log-spaced grid)
        grid_size: Points per component evaluation grid (defaults to settings)

    Returns:
        The fitted FrontierModel with every intermediate kept for audit

    Raises:
        DomainError: method and input count disagree, or invalid bandwidths
        ZeroResidualError: the first step reproduces Z exactly
    """
    kernel = kernel if isinstance(kernel, Kernel) else get_kernel(kernel)
    method = method or _default_method(data.m)
    _check_method(method, data.m)

    if isinstance(bandwidth, str):
        if bandwidth != "cv":
            raise DomainError(f"bandwidth must be 'cv' or positive numbers, got {bandwidth!r}")
        h = cv_bandwidth(
            data.X, data.Z, kernel, method, search_grid=search_grid, cbs_mode=cbs_mode, sbs_grid_size=sbs_grid_size
        )
        policy = "cv"
    else:
        try:
            h = bandwidth if isinstance(bandwidth, Bandwidths) else Bandwidths(h=bandwidth)
        except ValueError as exc:
            raise DomainError(f"invalid bandwidths {bandwidth!r}") from exc
        policy = "fixed"

    fit = _first_step(data, method, kernel, h, cbs_mode, sbs_grid_size, grid_size)

    Z = data.Z
    residuals = Z - fit.fitted
    if _is_zero_fit(residuals, float(np.max(np.abs(Z)))):
        raise ZeroResidualError(
            "first-step fit reproduces the data exactly (noiseless data or over-fitting bandwidth)"
        )
    p_hat = moment_estimate(residuals)
    logger.info("fitted %s frontier: h=%s p_hat=%.6g", method, h, p_hat)

    return FrontierModel(
        method=method,
        kernel=fit.kernel,
        bandwidths=h,
        bandwidth_policy=policy,
        p_hat=p_hat,
        intercept=fit.intercept,
        grids=fit.grids,
        grid_values=fit.grid_values,
        x_min=[float(v) for v in data.X.min(axis=0)],
        x_max=[float(v) for v in data.X.max(axis=0)],
        input_names=data.input_names,
        Y=data.Y,
        X=data.X,
        fitted=fit.fitted,
        residuals=residuals,
        smoother_fit=fit,
    )


def efficiency_scores(model: FrontierModel) -> EfficiencyReport:
    """r-hat_i = Y_i / f-hat(X_i) at the training units; crossings above one are counted, not clipped."""
    if model.Y is None:
        raise DomainError("efficiency scores need a model fitted on data")
    scores = model.Y / model.frontier_at_observations()
    above = int(np.count_nonzero(scores > 1.0))
    if above:
        logger.warning("%d of %d units lie above the estimated frontier", above, scores.shape[0])
    return EfficiencyReport(scores=scores, n_above_one=above)
