import pytest

from psi.instances import get_instance


@pytest.fixture(scope="session")
def pi():
    return get_instance("pi")


@pytest.fixture(scope="session")
def fusion():
    return get_instance("fusion")


@pytest.fixture(scope="session")
def crypto():
    return get_instance("crypto")
