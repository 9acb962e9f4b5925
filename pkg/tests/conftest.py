import numpy as np
import pytest

from qgbal.grid import Grid


@pytest.fixture(scope="session")
def grid8():
    return Grid(8, 8, 8)


@pytest.fixture(scope="session")
def grid16():
    return Grid(16, 16, 16)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def max_abs(field) -> float:
    return float(np.max(np.abs(field.coeffs)))


def rel_diff(a, b) -> float:
    num = float(np.max(np.abs(a.coeffs - b.coeffs)))
    den = max(float(np.max(np.abs(b.coeffs))), 1e-300)
    return num / den
