import math

import pytest

from bouncesim import Forcing, PowerLawPotential

SQRT2PI2 = 2.0 * math.sqrt(2.0) * math.pi  # isochronous period at p0 = -1


@pytest.fixture
def half_unit():
    """alpha = 1/2, p0 = -1: the fully closed-form reference case."""
    return PowerLawPotential(alpha=0.5, p0=-1.0)


@pytest.fixture
def const_forcing():
    return Forcing.constant(-1.0)


@pytest.fixture
def cosine_forcing():
    """p(t) = -2 + 0.1 cos t, the standard nonautonomous test forcing."""
    return Forcing.cosine(-2.0, 0.1)
