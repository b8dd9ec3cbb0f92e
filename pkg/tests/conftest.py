import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from vilenkin_rdf.mixed_radix import RadixSequence
from vilenkin_rdf.transform import GridFunction, grid_shape

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def random_function(rng, radices) -> GridFunction:
    radices = tuple(radices)
    shape = grid_shape(radices)
    return GridFunction(rng.standard_normal(shape) + 1j * rng.standard_normal(shape), radices)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


@pytest.fixture
def walsh4():
    return RadixSequence.uniform(2, 4)


@pytest.fixture
def mixed():
    return RadixSequence((2, 3, 4))
