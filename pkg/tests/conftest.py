import numpy as np
import pytest

from cone_lpv.data import (
    guas_not_polyqs_system,
    scalar_system,
    stability_reference_cone,
    stabilizability_reference_cone,
    unstabilizable_cascade_system,
)


@pytest.fixture
def rng():
    return np.random.RandomState(61507)


@pytest.fixture
def scaled_pair():
    """GUAS-but-not-poly-QS two-vertex system (contraction 1/1.19)."""
    return guas_not_polyqs_system()


@pytest.fixture
def unscaled_pair():
    """Same vertex pair without the contraction factor."""
    return guas_not_polyqs_system(scaled=False)


@pytest.fixture
def cascade():
    return unstabilizable_cascade_system()


@pytest.fixture
def stability_cone():
    return stability_reference_cone()


@pytest.fixture
def cascade_cone():
    return stabilizability_reference_cone()


def random_symmetric(rng, n, scale=1.0):
    M = rng.uniform(-scale, scale, (n, n))
    return (M + M.T) / 2.0
