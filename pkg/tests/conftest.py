import numpy as np
import pytest

import hidra


@pytest.fixture
def rng():
    return hidra.spawn_stream(12345, 0)


def sphere_fitness(x):
    """Scalar sphere reference used by several oracles."""
    return float(np.sqrt(np.sum(np.square(x))))
