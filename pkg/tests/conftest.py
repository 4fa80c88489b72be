import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "dragflow",
    deadline=None,
    max_examples=20,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("dragflow")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def numpy_backend():
    """Force the pure-numpy kernels for the duration of one test."""
    from dragflow import kernels

    previous = kernels.get_backend().NAME
    kernels.use_backend("numpy")
    yield kernels.get_backend()
    kernels.use_backend(previous)
