import pytest

from bptopics import synthetic


@pytest.fixture(scope="session")
def synthetic_small():
    return synthetic.generate(3, 30, 25, 20, 0.2, seed=5).corpus
