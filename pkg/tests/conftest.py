"""
Shared states for the test suite.
"""

import numpy as np
import pytest

from roofcoh.models.states import DensityMatrix, PureState


def pure(amplitudes, dims):
    return PureState.from_amplitudes(amplitudes, dims, normalize=True)


@pytest.fixture
def plus():
    return pure([1, 1], [2])


@pytest.fixture
def zero():
    return PureState.basis(0, [2])


@pytest.fixture
def bell():
    return pure([1, 0, 0, 1], [2, 2])


@pytest.fixture
def ghz():
    amps = np.zeros(8)
    amps[0] = amps[7] = 1
    return pure(amps, [2, 2, 2])


@pytest.fixture
def w_state():
    amps = np.zeros(8)
    amps[[1, 2, 4]] = 1
    return pure(amps, [2, 2, 2])


@pytest.fixture
def ghz4():
    amps = np.zeros(16)
    amps[0] = amps[15] = 1
    return pure(amps, [2, 2, 2, 2])


@pytest.fixture
def qubit_quarter():
    """[[0.5, 0.25], [0.25, 0.5]]"""
    return DensityMatrix.from_matrix(np.array([[0.5, 0.25], [0.25, 0.5]]), [2])
