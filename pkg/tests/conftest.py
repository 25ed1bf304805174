from random import Random

import pytest


@pytest.fixture
def rng():
    return Random(1234)


def random_files(n, size, seed=0):
    r = Random(seed)
    return [r.randbytes(size) for _ in range(n)]
