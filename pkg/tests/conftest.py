import numpy as np
import pytest

from haartorus.serialize import load_golden_c0


@pytest.fixture(scope="session")
def golden_c0():
    return load_golden_c0()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
