import numpy as np
import pytest

from polarfade.models import QuadratureSpec
from polarfade.services.cache import design_cache
from polarfade.services.metrics import metrics


@pytest.fixture(autouse=True)
def _reset_metrics():
    """Reset the metrics collector between every test."""
    metrics.reset()
    yield
    metrics.reset()


@pytest.fixture(autouse=True)
def _clear_design_cache():
    """Start every test with an empty design cache."""
    design_cache.clear()
    yield
    design_cache.clear()


@pytest.fixture
def quad() -> QuadratureSpec:
    return QuadratureSpec(abs_tol=1e-10, max_subdivisions=65536, range_sigmas=10.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)
