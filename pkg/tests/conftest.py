import numpy as np
import pytest

from petzlab import harness


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def qubit_pair(rng):
    return harness.random_density(2, rng), harness.random_density(2, rng)


def random_unitary(d, rng):
    Q, R = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))
