import pytest

from skewrot.exact import ExactReal


@pytest.fixture(scope="session")
def golden():
    # fractional part of the golden ratio: (-1 + sqrt(5)) / 2
    return ExactReal(-1, 1, 2, 5)


@pytest.fixture(scope="session")
def root2m1():
    return ExactReal(-1, 1, 1, 2)


@pytest.fixture(scope="session")
def root13_frac():
    # (-1 + sqrt(13)) / 2 reduced mod 1
    v = ExactReal(-1, 1, 2, 13)
    return v - v.floor()
