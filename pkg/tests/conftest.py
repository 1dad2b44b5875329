import pytest
from hypothesis import HealthCheck, settings

from _util import KERNEL_NAMES

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("default")


@pytest.fixture(params=KERNEL_NAMES)
def kernel(request):
    """Name of a derivative kernel; every kernel-dependent test runs on each."""
    return request.param
