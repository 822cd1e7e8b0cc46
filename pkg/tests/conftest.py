import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from confluent.diffusion_model import brownian_spec, langevin_t_spec
from confluent.rngkit import RngStream


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="lance aussi les tests statistiques longs")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="test long : relancer avec --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def stream():
    return RngStream(seed=1, stream_id=0)


@pytest.fixture
def t3():
    return langevin_t_spec(3.0)


@pytest.fixture
def bm():
    return brownian_spec()
