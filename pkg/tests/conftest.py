import os

import pytest
from hypothesis import HealthCheck, settings

from turnpoint import example1, example2

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(params=["example1", "example2"])
def builtin(request):
    return {"example1": example1, "example2": example2}[request.param]()


@pytest.fixture
def ex1():
    return example1()


@pytest.fixture
def ex2():
    return example2()
