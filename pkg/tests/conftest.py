import pytest

from ftdiff.dgf import builtin_dgf


@pytest.fixture(scope="session")
def ured():
    return builtin_dgf("ured")


@pytest.fixture(scope="session")
def expdgf():
    return builtin_dgf("exp")


@pytest.fixture(scope="session")
def sqrtdgf():
    return builtin_dgf("sqrt")
