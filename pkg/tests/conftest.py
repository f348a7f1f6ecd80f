import os

import pytest
from hypothesis import HealthCheck, settings

from birkhoff_levels.observables import from_values, indicator, symbol_indicator
from birkhoff_levels.systems import full_shift, golden_mean

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def full2():
    return full_shift(2)


@pytest.fixture
def golden():
    return golden_mean()


@pytest.fixture
def ones2(full2):
    return symbol_indicator(full2, 1)


@pytest.fixture
def pair11(full2):
    return indicator(full2, "11")


@pytest.fixture
def golden_ones(golden):
    return symbol_indicator(golden, 1)


@pytest.fixture
def golden_00(golden):
    return from_values(golden, 2, {(0, 0): 1})
