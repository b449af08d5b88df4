import pytest
from hypothesis import settings

settings.register_profile("det", derandomize=True, max_examples=60)
settings.load_profile("det")

from pgraphs.coset_model import PadicModel, TreeModel  # noqa: E402


@pytest.fixture(scope="session")
def model_5_1():
    """Diagonal two-coordinate action, both scaled by 2."""
    return PadicModel(((2, (1, 0)), (2, (0, 1))))


@pytest.fixture(scope="session")
def model_5_2():
    """Three residue coordinates driven by two directions, prime 2."""
    return PadicModel(((2, (1, 0)), (2, (1, 1)), (2, (0, 1))))


@pytest.fixture(scope="session")
def model_5_3():
    """Two coordinates scaled along n1+n2 and n1-n2, prime 2."""
    return PadicModel(((2, (1, 1)), (2, (1, -1))))


@pytest.fixture(scope="session")
def model_coprime():
    return PadicModel(((2, (1, 0)), (3, (0, 1))))


@pytest.fixture(scope="session")
def tree_3():
    return TreeModel((3,))
