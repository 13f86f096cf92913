import math

import numpy as np
import pytest

from bouncesim import (
    AccuracyError,
    BelowCenterError,
    PowerLawPotential,
    Regime,
    RegimeError,
    monotonicity_scan,
    period_bouncing,
    period_classical,
    period_closed_form_half,
    period_derivative,
    period_extended,
)
from conftest import SQRT2PI2


class TestClosedFormOracle:
    """alpha = 1/2 quadrature against the explicit antiderivative."""

    @pytest.mark.parametrize("p0", [-0.5, -1.0, -2.0])
    def test_classical_branch_isochronous(self, p0):
        P = PowerLawPotential(alpha=0.5, p0=p0)
        ref = 2.0 * math.sqrt(2.0) * math.pi / (-p0) ** 1.5
        for h in np.linspace(P.h_center * 0.95, -0.02 * abs(P.h_center), 20):
            s = period_classical(P, float(h))
            assert s.T == pytest.approx(ref, rel=1e-10)
            assert s.regime is Regime.CLASSICAL

    @pytest.mark.parametrize("p0", [-0.5, -1.0, -2.0])
    def test_bouncing_branch(self, p0):
        P = PowerLawPotential(alpha=0.5, p0=p0)
        for h in np.geomspace(1e-4, 100.0, 20):
            s = period_bouncing(P, float(h))
            assert s.T == pytest.approx(period_closed_form_half(p0, float(h)), rel=1e-10)
            assert s.regime is Regime.BOUNCING

    def test_boundary_limit(self, half_unit):
        s = period_bouncing(half_unit, 0.0)
        assert s.T == pytest.approx(SQRT2PI2, rel=1e-11)

    def test_closed_form_reference_points(self):
        assert period_closed_form_half(-1.0, -0.3) == pytest.approx(SQRT2PI2, rel=1e-15)
        # pi/2 + atan(1) = 3*pi/4 at h = 1
        expected = 2.0 * math.sqrt(2.0) * 0.75 * math.pi + 2.0 * math.sqrt(2.0)
        assert period_closed_form_half(-1.0, 1.0) == pytest.approx(expected, rel=1e-15)
        assert period_closed_form_half(-8.0, -0.1) == pytest.approx(math.pi / 8.0, rel=1e-15)


class TestRegimeDispatch:
    def test_dispatch_matches_sign(self, half_unit):
        assert period_extended(half_unit, -0.5).regime is Regime.CLASSICAL
        assert period_extended(half_unit, 0.0).regime is Regime.BOUNCING
        assert period_extended(half_unit, 2.0).regime is Regime.BOUNCING

    def test_wrong_regime_raises(self, half_unit):
        with pytest.raises(RegimeError):
            period_classical(half_unit, 0.5)
        with pytest.raises(RegimeError):
            period_bouncing(half_unit, -0.5)
        with pytest.raises(BelowCenterError):
            period_extended(half_unit, -2.0)

    def test_every_energy_has_exactly_one_regime(self, half_unit):
        for h in np.linspace(-0.99, 3.0, 23):
            s = period_extended(half_unit, float(h))
            expected = Regime.CLASSICAL if h < 0 else Regime.BOUNCING
            assert s.regime is expected
            assert s.T > 0.0
            assert s.quadrature_error_estimate >= 0.0


class TestCenterLimit:
    @pytest.mark.parametrize("alpha,p0", [(0.5, -1.0), (0.5, -2.0), (0.75, -1.3)])
    def test_harmonic_value_at_center(self, alpha, p0):
        P = PowerLawPotential(alpha=alpha, p0=p0)
        harmonic = 2.0 * math.pi / math.sqrt(alpha * (-p0) ** ((1.0 + alpha) / alpha))
        near = period_classical(P, P.h_center + 1e-9)
        assert near.T == pytest.approx(harmonic, rel=1e-12)
        approach = period_classical(P, P.h_center + 1e-5)
        assert approach.T == pytest.approx(harmonic, rel=1e-4)


class TestValueContinuityAtBoundary:
    def test_values_match_across_zero(self, half_unit):
        left = period_extended(half_unit, -1e-6).T
        right = period_extended(half_unit, 1e-6).T
        assert abs(left - right) < 1e-3


class TestGrowth:
    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_period_grows_with_energy(self, alpha):
        P = PowerLawPotential(alpha=alpha, p0=-1.0)
        Ts = [period_extended(P, 10.0**k).T for k in range(5)]
        assert all(b > a for a, b in zip(Ts, Ts[1:]))


class TestDerivative:
    def test_isochronous_branch_flat(self, half_unit):
        assert abs(period_derivative(half_unit, -0.5, 1e-4)) < 1e-6

    def test_increasing_above_half(self):
        P = PowerLawPotential(alpha=0.75, p0=-1.0)
        assert period_derivative(P, 0.5, 1e-5) > 0.0

    def test_decreasing_below_half(self):
        P = PowerLawPotential(alpha=0.25, p0=-1.0)
        assert period_derivative(P, -0.05, 1e-6) < 0.0

    def test_boundary_is_one_sided(self, half_unit):
        d = period_derivative(half_unit, 0.0, 1e-4)
        assert d == pytest.approx((period_extended(half_unit, 1e-4).T - SQRT2PI2) / 1e-4, rel=1e-6)

    def test_step_crossing_regimes_raises(self, half_unit):
        with pytest.raises(AccuracyError):
            period_derivative(half_unit, -1e-5, 1e-4)
        with pytest.raises(AccuracyError):
            period_derivative(half_unit, -0.999, 1e-2)


class TestMonotonicityScan:
    def test_increasing_above_half(self):
        P = PowerLawPotential(alpha=0.75, p0=-1.0)
        rep = monotonicity_scan(P, np.linspace(-0.9, 10.0, 25))
        assert rep.kind == "increasing"
        assert rep.pattern == "increasing"

    def test_constant_then_increasing_at_half(self, half_unit):
        rep = monotonicity_scan(half_unit, np.linspace(-0.9, -0.1, 9))
        assert rep.kind == "constant"
        grid = np.concatenate([np.linspace(-0.9, -0.05, 8), np.linspace(0.1, 8.0, 12)])
        rep2 = monotonicity_scan(half_unit, grid)
        assert rep2.pattern == "constant->increasing"
        assert rep2.kind == "mixed"

    def test_decreasing_inside_annulus_below_half(self):
        P = PowerLawPotential(alpha=0.25, p0=-1.0)
        rep = monotonicity_scan(P, np.linspace(-0.32, -0.02, 10))
        assert rep.kind == "decreasing"

    def test_eventual_increase_below_half(self):
        P = PowerLawPotential(alpha=0.25, p0=-1.0)
        grid = np.concatenate([np.linspace(-0.32, -0.02, 8), np.linspace(0.5, 10.0, 14)])
        rep = monotonicity_scan(P, grid)
        assert rep.runs[0][0] == "decreasing"
        assert rep.runs[-1][0] == "increasing"
        assert rep.h_increasing_from is not None
        assert rep.crossings  # the turning interval is reported

    def test_small_grid_rejected(self, half_unit):
        with pytest.raises(ValueError):
            monotonicity_scan(half_unit, [0.1, 0.2])
        with pytest.raises(ValueError):
            monotonicity_scan(half_unit, [0.3, 0.2, 0.1])
