import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20250808)


@pytest.fixture
def random_complex(rng):
    def make(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    return make


@pytest.fixture
def random_hermitian(random_complex):
    def make(d):
        z = random_complex(d, d)
        return (z + z.conj().T) / 2.0

    return make


@pytest.fixture
def random_psd(random_complex):
    def make(d):
        z = random_complex(d, d)
        return z @ z.conj().T / d

    return make
