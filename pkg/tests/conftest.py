import numpy as np
import pytest

from kvnbox import GridSpec, Representation, make_gaussian_state


@pytest.fixture(scope="session")
def box_grid():
    """Default box geometry: L = 1, kappa harmonics are multiples of 0.1."""
    return GridSpec(0.0, 1.0, 256, -12.8, 12.8, 256)


@pytest.fixture(scope="session")
def box_state(box_grid):
    """Wall-compliant packet: 10 sigma clearance from both walls."""
    return make_gaussian_state(
        box_grid, Representation.POSITION_MOMENTUM, 0.5, 1.0, 0.05, 0.32
    )


@pytest.fixture(scope="session")
def free_grid():
    return GridSpec(-6.0, 6.0, 256, -6.4, 6.4, 256)


@pytest.fixture(scope="session")
def free_state(free_grid):
    return make_gaussian_state(
        free_grid, Representation.POSITION_MOMENTUM, -2.0, 1.0, 0.15, 0.2
    )


def gaussian_density(q, p, q0, p0, sq, sp):
    """Closed-form density of the product Gaussian used across oracle tests."""
    return (
        1.0 / (2.0 * np.pi * sq * sp)
        * np.exp(-((q - q0) ** 2) / (2 * sq**2) - ((p - p0) ** 2) / (2 * sp**2))
    )
