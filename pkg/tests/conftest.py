import math

import numpy as np
import pytest

from zermelo import make_historical, make_powerlaw, make_vortex


@pytest.fixture(scope="session")
def historical():
    return make_historical()


@pytest.fixture(scope="session")
def vortex():
    return make_vortex(1.0)


@pytest.fixture(scope="session")
def vortex2():
    return make_vortex(2.0)


@pytest.fixture(scope="session")
def powerlaw_historical_twin():
    # same profiles as the historical family, but in the polar chart on r > 0
    return make_powerlaw(k=1.0, a=1.0, b=0.0)


def angle_gap(a, b):
    """Circular distance between two angles."""
    d = (a - b) % (2.0 * math.pi)
    return float(np.minimum(d, 2.0 * math.pi - d))
