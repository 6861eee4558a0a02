"""Numerical core of Frontier Lab."""

from . import errors, matsuoka, simlab, special_fn
from .frontier import efficiency_scores, fit_frontier, fit_p_oracle
from .kernels import Kernel, get_kernel
from .simlab import StudyRunner, ase, consistency_echo, derive_seed, generate, run_study

__all__ = [
    "errors",
    "matsuoka",
    "simlab",
    "special_fn",
    "Kernel",
    "get_kernel",
    "fit_frontier",
    "efficiency_scores",
    "fit_p_oracle",
    "StudyRunner",
    "ase",
    "consistency_echo",
    "derive_seed",
    "generate",
    "run_study",
]
