"""First-step regression smoothers."""

from .bandwidth import cv_bandwidth, cv_scores, default_search_grid, make_smoother
from .base import BaseSmoother
from .classical_backfitting import (
    ClassicalBackfitter,
    backfitting_matrices,
    backfitting_norms,
    cbs_fit,
    centered_smoother,
)
from .local_linear import LocalLinearSmoother, design_slice, equivalent_kernel, local_linear_fit, smoother_matrix
from .smooth_backfitting import SmoothBackfitGrid, SmoothBackfitter, sbs_fit

__all__ = [
    "BaseSmoother",
    "LocalLinearSmoother",
    "ClassicalBackfitter",
    "SmoothBackfitter",
    "SmoothBackfitGrid",
    "equivalent_kernel",
    "design_slice",
    "smoother_matrix",
    "local_linear_fit",
    "centered_smoother",
    "backfitting_norms",
    "backfitting_matrices",
    "cbs_fit",
    "sbs_fit",
    "cv_bandwidth",
    "cv_scores",
    "default_search_grid",
    "make_smoother",
]
