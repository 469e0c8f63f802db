import numpy as np
import pytest

from lossylab.fock import random_mixed, random_pure


@pytest.fixture
def pure_corpus():
    def build(count, cutoff=8, seed0=100):
        return [(f"pure:{seed0 + i}", random_pure(seed0 + i, cutoff))
                for i in range(count)]
    return build


@pytest.fixture
def mixed_corpus():
    def build(count, cutoff=8, rank=3, seed0=300):
        return [(f"mixed:{seed0 + i}", random_mixed(seed0 + i, cutoff, rank))
                for i in range(count)]
    return build


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
