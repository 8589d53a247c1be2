import pytest

from rvvprobe.core import VectorConfig


@pytest.fixture(scope="session")
def cfg():
    return VectorConfig(256)


@pytest.fixture(scope="session")
def wide_cfg():
    return VectorConfig(1024)
