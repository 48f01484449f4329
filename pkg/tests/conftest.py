"""Shared fixtures and deterministic test helpers."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rankspectral import SymmetricMatrix

settings.register_profile(
    "repeatable",
    derandomize=True,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repeatable")


def random_symmetric(n, seed, low=0.0, high=1.0):
    """Symmetric matrix with iid pair values drawn from Uniform(low, high)."""
    rng = np.random.default_rng(seed)
    values = rng.uniform(low, high, size=n * (n - 1) // 2)
    return SymmetricMatrix(n, values)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
