import pytest

from skewmix.sft import SubshiftSpec


@pytest.fixture(scope="session")
def golden_spec():
    """Golden-mean shift: 11 forbidden, theta = 1/2."""
    return SubshiftSpec(2, [[1, 1], [1, 0]], 0.5)


@pytest.fixture(scope="session")
def full_shift_spec():
    return SubshiftSpec(2, [[1, 1], [1, 1]], 0.5)
