import numpy as np
import pytest
from hypothesis import settings

from slidingdg.mesh import build_mesh
from slidingdg.physics import GasModel
from tests.helpers import three_band_spec

settings.register_profile("slidingdg", deadline=None, derandomize=True, max_examples=25)
settings.load_profile("slidingdg")


@pytest.fixture
def gas() -> GasModel:
    return GasModel()


@pytest.fixture
def sliding_mesh():
    return build_mesh(three_band_spec())


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
