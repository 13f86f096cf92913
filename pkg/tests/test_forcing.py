import math

import numpy as np
import pytest

from bouncesim import BoundsError, Forcing


def test_constant():
    F = Forcing.constant(-1.5)
    assert F.p1 == F.p2 == -1.5
    assert F.is_constant
    assert F(0.3) == -1.5


def test_cosine_bounds_certified():
    F = Forcing.cosine(-2.0, 0.1)
    t = np.linspace(0.0, 2.0 * math.pi, 10001)
    vals = F(t)
    assert F.p2 <= vals.min() and vals.max() <= F.p1
    # certified bounds are tight up to the widening pad
    assert F.p1 == pytest.approx(-1.9, abs=1e-6)
    assert F.p2 == pytest.approx(-2.1, abs=1e-6)
    assert F.p1 < 0.0


def test_multi_harmonic_bounds_contain_samples():
    F = Forcing(c0=-3.0, harmonics=((1, 0.2, -0.1), (3, 0.05, 0.08)))
    t = np.linspace(0.0, 2.0 * math.pi, 20001)
    vals = F(t)
    assert F.p2 <= vals.min() <= vals.max() <= F.p1


def test_periodicity():
    F = Forcing(c0=-2.0, harmonics=((2, 0.3, 0.1),))
    for t in (0.0, 0.7, 4.1):
        assert F(t + 2.0 * math.pi) == pytest.approx(F(t), abs=1e-14)


def test_positive_forcing_rejected():
    with pytest.raises(BoundsError):
        Forcing.constant(0.5)
    with pytest.raises(BoundsError):
        Forcing(c0=-0.05, harmonics=((1, 0.2, 0.0),))


def test_dict_roundtrip():
    F = Forcing(c0=-2.0, harmonics=((1, 0.1, 0.0), (2, 0.0, -0.05)))
    G = Forcing.from_dict(F.to_dict())
    assert G.c0 == F.c0
    assert G.harmonics == F.harmonics
    assert G.p1 == F.p1


def test_zero_amplitude_harmonics_dropped():
    F = Forcing(c0=-1.0, harmonics=((1, 0.0, 0.0),))
    assert F.is_constant
    assert F.p1 == F.p2 == -1.0
