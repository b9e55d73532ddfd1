import numpy as np
import pytest

from pilotshift import modem


def dft_matrix(n, sign):
    """Direct O(N^2) unitary DFT matrix, independent of the radix-2 code."""
    k = np.arange(n)
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / n) / np.sqrt(n)


def random_qpsk(rng, count):
    return modem.qpsk_map(rng.integers(0, 2, 2 * count))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
