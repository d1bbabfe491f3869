import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bopp_podolsky.fields import ModelParams  # noqa: E402
from bopp_podolsky.grid import make_radial_grid  # noqa: E402


@pytest.fixture(scope="session")
def grid():
    return make_radial_grid(4096, 40.0)


@pytest.fixture(scope="session")
def small_grid():
    return make_radial_grid(1024, 20.0)


@pytest.fixture(scope="session")
def Q4():
    from bopp_podolsky.solvers import cached_Q

    return cached_Q(4.0)


@pytest.fixture(scope="session")
def params_405():
    return ModelParams(p=4.0, a=1.0, m=0.5)


@pytest.fixture(scope="session")
def ground_405(params_405):
    from bopp_podolsky.solvers import ground_state

    return ground_state(params_405)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
