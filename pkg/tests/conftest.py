import numpy as np
import pytest

from uqc import data


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def small_sets():
    """Small train/test sets per problem for quick training runs."""
    return {
        p: (data.generate(p, 300, 11), data.generate(p, 400, 12))
        for p in ("circle", "sine", "two-circles")
    }
