import numpy as np
import pytest


@pytest.fixture
def zs():
    """Upper half plane points, fixed across runs."""
    rng = np.random.default_rng(2024)
    return rng.uniform(-3, 3, 40) + 1j * rng.uniform(0.05, 3, 40)
