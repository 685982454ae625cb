import os

import pytest
from hypothesis import HealthCheck, settings

from cito.eord import build_eord
from cito.samples import abc_model

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def abc():
    return abc_model()


@pytest.fixture(scope="session")
def abc_eord(abc):
    return build_eord(abc)


@pytest.fixture(scope="session")
def abc_ord(abc):
    return build_eord(abc, transitive=False)
