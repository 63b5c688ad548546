import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from ehcap.model import ChannelParams, EnergyModel, NetworkParams, UNBOUNDED


@pytest.fixture
def channel_small():
    """alpha=3, theta=1, d=1: lambda_max = 1/kappa(3)."""
    return ChannelParams(3.0, 1.0, 1.0)


@pytest.fixture
def channel_ref():
    """alpha=3, theta=2, d=2: the reference sweep channel."""
    return ChannelParams(3.0, 2.0, 2.0)


@pytest.fixture
def net_ref(channel_ref):
    """lam=0.1, p=0.5, unbounded battery on the reference channel."""
    return NetworkParams(0.1, channel_ref, EnergyModel(0.5, UNBOUNDED))
