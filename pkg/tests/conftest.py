"""Shared fixtures."""

import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from scipy import integrate, stats

from src.core.simlab import generate
from src.models import DgpSpec


def expect_matsuoka(p: float, fn) -> float:
    """E fn(X) for X ~ M(p), integrated over t = -ln X ~ Gamma(3/2, 1/p)."""

    def integrand(t: float) -> float:
        weight = stats.gamma.pdf(t, 1.5, scale=1.0 / p)
        x = math.exp(-t)
        # x underflows to 0 only where the weight is negligible
        if weight == 0.0 or x == 0.0:
            return 0.0
        return fn(x) * weight

    value, _ = integrate.quad(
        integrand,
        0.0,
        np.inf,
        limit=400,
        epsabs=1e-14,
        epsrel=1e-12,
    )
    return value


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def dgp_sample():
    """Factory for simulated samples with their latent truth."""

    def make(kind: str = "dgp_i", p: float = 2.0, n: int = 100, seed: int = 1):
        return generate(DgpSpec(kind=kind, p=p, n=n, seed=seed))

    return make


@pytest.fixture
def write_csv(tmp_path):
    """Write a DataFrame-like mapping to a CSV under tmp_path and return its path."""

    def write(name: str, columns: dict) -> Path:
        path = tmp_path / name
        pd.DataFrame(columns).to_csv(path, index=False)
        return path

    return write
