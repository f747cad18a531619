import numpy as np
import pytest


def random_matrix(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def random_hermitian(rng, d):
    M = random_matrix(rng, d)
    return 0.5 * (M + M.conj().T)


def random_density(rng, d):
    M = random_matrix(rng, d)
    rho = M @ M.conj().T
    return rho / np.trace(rho)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
