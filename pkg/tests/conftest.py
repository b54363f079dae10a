import numpy as np
import pytest

from simulation.fock_core import coherent_state, product_state


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def coherent_pair():
    """|1.2⟩ ⊗ |−1.5⟩ при dim = 64."""
    return product_state([coherent_state(1.2, 64), coherent_state(-1.5, 64)])


@pytest.fixture
def small_pair():
    """|1.2⟩ ⊗ |−1.5⟩ при dim = 24: для проверок через матрицу плотности."""
    return product_state([coherent_state(1.2, 24), coherent_state(-1.5, 24)])
