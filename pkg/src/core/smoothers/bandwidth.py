"""Leave-one-out bandwidth selection."""

import itertools
import logging
from typing import Iterable, Optional, Union

import numpy as np

from ...config import settings
from ...models import Bandwidths, SmootherMethod
from ..errors import BandwidthSelectionError, DomainError, FrontierLabError
from ..kernels import Kernel
from .base import BaseSmoother
from .classical_backfitting import ClassicalBackfitter
from .local_linear import LocalLinearSmoother
from .smooth_backfitting import SmoothBackfitter

logger = logging.getLogger(__name__)


def make_smoother(
    method: SmootherMethod,
    kernel: Union[Kernel, str],
    cbs_mode: Optional[str] = None,
    sbs_grid_size: Optional[int] = None,
    grid_size: Optional[int] = None,
) -> BaseSmoother:
    """Smoother instance for a method tag; grid_size sets the component evaluation grid."""
    if method == "loclin":
        return LocalLinearSmoother(kernel, grid_size=grid_size)
    if method == "cbs":
        return ClassicalBackfitter(kernel, mode=cbs_mode or settings.cbs_mode, grid_size=grid_size)
    if method == "sbs":
        return SmoothBackfitter(kernel, grid_size=grid_size, sbs_grid_size=sbs_grid_size)
    raise DomainError(f"unknown smoothing method {method!r}")


def axis_candidates(column: np.ndarray, size: int) -> np.ndarray:
    """``size`` log-spaced values over [0.1 sd n^-1/5, 2 range]."""
    n = column.shape[0]
    spread = float(np.std(column, ddof=1))
    width = float(np.ptp(column))
    if spread <= 0 or width <= 0:
        raise DomainError("bandwidth search needs a non-constant covariate")
    lo = 0.1 * spread * n ** (-0.2)
    return np.geomspace(lo, 2.0 * width, size)


def default_search_grid(X, size: Optional[int] = None) -> list[Bandwidths]:
    """Default candidates: one axis grid for m=1, the Cartesian product of two for m=2."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] == 1:
        size = size or settings.cv_grid_size
        return [Bandwidths(h=(float(h),)) for h in axis_candidates(X[:, 0], size)]
    size = size or settings.cv_grid_size_bivariate
    axes = [axis_candidates(X[:, j], size) for j in range(X.shape[1])]
    return [Bandwidths(h=tuple(float(v) for v in combo)) for combo in itertools.product(*axes)]


def cv_scores(
    X,
    Z,
    smoother: BaseSmoother,
    search_grid: Iterable[Bandwidths],
) -> list[tuple[Bandwidths, Optional[float], Optional[str]]]:
    """(candidate, CV score or None, failure reason or None) per candidate, in grid order."""
    results = []
    for h in search_grid:
        try:
            results.append((h, smoother.cv_score(X, Z, h), None))
        except (FrontierLabError, np.linalg.LinAlgError) as exc:
            results.append((h, None, f"{type(exc).__name__}: {exc}"))
    return results


def cv_bandwidth(
    X,
    Z,
    kernel: Union[Kernel, str],
    method: SmootherMethod,
    search_grid: Optional[Iterable[Bandwidths]] = None,
    cbs_mode: Optional[str] = None,
    sbs_grid_size: Optional[int] = None,
) -> Bandwidths:
    """
    Bandwidth minimizing CV(h) = n^-1 sum (Z_i - g-hat_{-i}(X_i))^2.

    Candidates whose leave-one-out fits fail are skipped; ties go to the
    larger bandwidth product.

    Raises:
        DomainError: for an empty search grid
        BandwidthSelectionError: if every candidate fails
    """
    smoother = make_smoother(method, kernel, cbs_mode=cbs_mode, sbs_grid_size=sbs_grid_size)
    grid = list(search_grid) if search_grid is not None else default_search_grid(X)
    if not grid:
        raise DomainError("bandwidth search grid is empty")

    results = cv_scores(X, Z, smoother, grid)
    scored = [(score, h) for h, score, _ in results if score is not None and np.isfinite(score)]
    skipped = [(h, reason) for h, score, reason in results if score is None or not np.isfinite(score)]
    if skipped:
        logger.warning(
            "%s: skipped %d of %d bandwidth candidates (first: h=%s, %s)",
            method,
            len(skipped),
            len(grid),
            skipped[0][0],
            skipped[0][1] or "non-finite score",
        )
    if not scored:
        raise BandwidthSelectionError(f"all {len(grid)} bandwidth candidates failed for {method}")

    best_score, best_h = min(scored, key=lambda pair: (pair[0], -pair[1].product()))
    logger.debug("%s: cv picked h=%s (score %.6g)", method, best_h, best_score)
    return best_h
