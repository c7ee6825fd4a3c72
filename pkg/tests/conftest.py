import mpmath
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

mpmath.mp.dps = 30


@pytest.fixture
def mp():
    return mpmath
