import numpy as np
import pytest

from chenhopf.chen import canonical_config, random_admissible_config


@pytest.fixture
def canonical():
    return canonical_config()


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def admissible_configs(rng):
    return [random_admissible_config(rng) for _ in range(10)]
