import numpy as np
import pytest

from streetlayers.core import GroundPlaneModel, N_LABELS
from streetlayers.energy import ColumnCosts


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def int_column(rng, height, disparities, hi=9):
    return ColumnCosts(rng.integers(0, hi + 1, (height, N_LABELS)).astype(float),
                       rng.integers(0, hi + 1, (height, disparities)).astype(float))


def random_model(rng, height, disparities):
    horizon = float(rng.choice([1.0, height / 3, height / 2]))
    slope = float(rng.choice([0.25, 0.5, 1.0]))
    return GroundPlaneModel(horizon, slope, disparities)
