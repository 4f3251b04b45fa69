import pathlib

import numpy as np
import pytest

from rankone import fixtures

PROBLEMS = pathlib.Path(__file__).resolve().parent.parent / "demos" / "problems"


@pytest.fixture
def generic():
    return fixtures.example_generic()


@pytest.fixture
def kappa_one():
    return fixtures.example_kappa_one()


@pytest.fixture
def collision():
    return fixtures.example_collision()


@pytest.fixture
def nilpotent():
    return fixtures.degenerate_nilpotent()


@pytest.fixture
def scalar():
    return fixtures.scalar_identity()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def problems_dir():
    return PROBLEMS
