from pathlib import Path

import numpy as np
import pytest

from feasibility.core import FeasibilityProblem, SlaterCertificate
from feasibility.functions import LinearFunctional

ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def problems_dir() -> Path:
    return ROOT / "problems"


@pytest.fixture
def data_dir() -> Path:
    return ROOT / "data"


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def neg_x() -> FeasibilityProblem:
    """f(x) = -x on R with the slater point s = 4, sigma = 4, L = 1."""
    return FeasibilityProblem((LinearFunctional([-1.0], 0.0),), 1, SlaterCertificate(s=[4.0], sigma=4.0, L=1.0))


@pytest.fixture
def opposed() -> FeasibilityProblem:
    return FeasibilityProblem((LinearFunctional([-1.0], 0.0), LinearFunctional([1.0], 0.0)), 1)
