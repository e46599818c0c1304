import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from models.semigroup import ExtensionPolicy, SemigroupSpec, StateVector  # noqa: E402
from services.semigroup_service import semigroup_service  # noqa: E402


@pytest.fixture
def diagonal_semigroup():
    """exp(-tA) with A = diag(1, 4)"""
    return SemigroupSpec.from_matrix(np.diag([1.0, 4.0]))


@pytest.fixture
def dirichlet_semigroup():
    return SemigroupSpec.from_matrix(semigroup_service.dirichlet_laplacian(8))


@pytest.fixture
def unit_vector():
    rng = np.random.default_rng(20240611)
    entries = rng.standard_normal(8)
    return StateVector.finite(entries / np.linalg.norm(entries))


@pytest.fixture
def heat1d():
    return SemigroupSpec.heat(1)


@pytest.fixture
def cosine_grid():
    """cos on 512 points of [0, 2*pi), periodic"""
    return semigroup_service.periodic_grid()


@pytest.fixture
def gaussian_grid():
    """exp(-x**2/4) on [-20, 20] with spacing 0.05, constant edges"""
    return semigroup_service.edge_grid(lambda x: np.exp(-x ** 2 / 4.0))


@pytest.fixture
def cosine_grid2d():
    n = 128
    h = 2.0 * math.pi / n
    axis = h * np.arange(n)
    samples = np.outer(np.cos(axis), np.cos(axis))
    return StateVector.grid2d(samples, spacing=h, extension=ExtensionPolicy.PERIODIC)
