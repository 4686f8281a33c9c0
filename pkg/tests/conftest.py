import pytest

from devronlab.rng import make_rng


@pytest.fixture
def rng():
    return make_rng(20240601)
