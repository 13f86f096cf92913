import math

import numpy as np
import pytest

from bouncesim import QuadratureError, tanh_sinh


def test_smooth_integrand():
    res = tanh_sinh(lambda x, dl, dh: np.exp(x), 0.0, 1.0)
    assert res.value == pytest.approx(math.e - 1.0, abs=1e-14)
    assert res.error < 1e-12


def test_inverse_sqrt_right_endpoint():
    res = tanh_sinh(lambda x, dl, dh: 1.0 / np.sqrt(dh), 0.0, 1.0)
    assert res.value == pytest.approx(2.0, abs=1e-13)


def test_both_endpoints_singular():
    res = tanh_sinh(lambda x, dl, dh: 1.0 / np.sqrt(dl * dh), 0.0, 1.0)
    assert res.value == pytest.approx(math.pi, abs=1e-13)


@pytest.mark.parametrize("p", [0.125, 0.375, 0.625])
def test_algebraic_endpoint_power(p):
    res = tanh_sinh(lambda x, dl, dh: dl ** (-p), 0.0, 2.0)
    assert res.value == pytest.approx(2.0 ** (1.0 - p) / (1.0 - p), rel=1e-13)


def test_interval_must_be_ordered():
    with pytest.raises(QuadratureError):
        tanh_sinh(lambda x, dl, dh: x, 1.0, 0.0)


def test_nonintegrable_singularity_raises():
    with pytest.raises(QuadratureError):
        tanh_sinh(lambda x, dl, dh: 1.0 / dl, 0.0, 1.0, max_level=8)


def test_error_estimate_is_conservative():
    res = tanh_sinh(lambda x, dl, dh: np.cos(7.0 * x), 0.0, 2.0)
    exact = math.sin(14.0) / 7.0
    assert abs(res.value - exact) <= max(res.error, 1e-14)
