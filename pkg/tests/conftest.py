import numpy as np
import pytest

import torusfc as tc


@pytest.fixture
def g16():
    return tc.TorusGrid(1, 16)


@pytest.fixture
def g32():
    return tc.TorusGrid(1, 32)


@pytest.fixture
def g2d8():
    return tc.TorusGrid(2, 8)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def perturbed32(g32):
    return tc.builtin_family(
        "perturbed_elliptic", g32, m=2, rho=0.5, delta=0.0, eps0=0.25
    )
