"""Shared fixtures; the expensive dense eigensolves are computed once."""

import numpy as np
import pytest

from spectrace import (
    assemble_companion,
    build_grid_operator,
    compute_spectrum,
)
from spectrace.experiments import EXAMPLES


@pytest.fixture(scope="session")
def grid400():
    return build_grid_operator(400)


@pytest.fixture(scope="session")
def ex1_spectrum(grid400):
    """Example-1 spectrum at the reference resolution, 60 labeled pairs."""
    alpha = EXAMPLES["ex1"].alpha_true
    companion = assemble_companion(grid400, alpha(grid400.grid_x))
    return compute_spectrum(companion, 60)


@pytest.fixture(scope="session")
def unit_damping_spectrum(grid400):
    """Numerical spectrum of the constant damping alpha == 1, 10 pairs."""
    companion = assemble_companion(grid400, np.ones(grid400.grid_x.size))
    return compute_spectrum(companion, 10)
