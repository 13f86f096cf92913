import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bouncesim import (
    BelowCenterError,
    BoundsError,
    DomainError,
    PowerLawPotential,
    energy_gap_from,
    eval_derivatives,
    gamma_threshold,
    schaaf_expression,
    schaaf_expression_closed_form,
    schaaf_integrands,
    turning_points,
)

alphas = st.floats(min_value=0.05, max_value=0.95)
p0s = st.floats(min_value=-5.0, max_value=-0.1)


class TestPowerLawPotential:
    def test_construction_validates(self):
        with pytest.raises(DomainError):
            PowerLawPotential(alpha=1.2, p0=-1.0)
        with pytest.raises(DomainError):
            PowerLawPotential(alpha=0.5, p0=0.5)

    def test_reference_values(self, half_unit):
        # V(u) = u - 2*sqrt(u): direct substitution
        v, dv, d2v, d3v, d4v = eval_derivatives(half_unit, 1.0)
        assert v == pytest.approx(-1.0, abs=1e-15)
        assert dv == pytest.approx(0.0, abs=1e-15)
        assert d2v == pytest.approx(0.5, abs=1e-15)
        assert eval_derivatives(half_unit, 4.0)[0] == pytest.approx(0.0, abs=1e-14)

    def test_singularity_domain(self, half_unit):
        with pytest.raises(DomainError):
            eval_derivatives(half_unit, 0.0)
        with pytest.raises(DomainError):
            half_unit.value(-1.0)

    @given(alpha=alphas, p0=p0s)
    @settings(max_examples=40, deadline=None)
    def test_center_is_critical_point(self, alpha, p0):
        P = PowerLawPotential(alpha=alpha, p0=p0)
        assert abs(P.dV(P.u_center)) < 1e-10 * max(1.0, -p0)
        assert P.d2V(P.u_center) > 0.0

    @given(alpha=alphas, p0=p0s)
    @settings(max_examples=40, deadline=None)
    def test_outer_zero(self, alpha, p0):
        P = PowerLawPotential(alpha=alpha, p0=p0)
        assert abs(P.value(P.u_zero)) < 1e-12 * max(1.0, P.u_zero * -p0)

    @given(alpha=alphas, p0=p0s, u=st.floats(min_value=0.05, max_value=50.0))
    @settings(max_examples=40, deadline=None)
    def test_derivatives_match_finite_differences(self, alpha, p0, u):
        P = PowerLawPotential(alpha=alpha, p0=p0)
        e = 1e-6 * u
        fd1 = (P.value(u + e) - P.value(u - e)) / (2 * e)
        fd2 = (P.dV(u + e) - P.dV(u - e)) / (2 * e)
        assert fd1 == pytest.approx(P.dV(u), rel=1e-6, abs=1e-8)
        assert fd2 == pytest.approx(P.d2V(u), rel=1e-6, abs=1e-8)


class TestTurningPoints:
    def test_quadratic_case(self, half_unit):
        # s**2 - 2s - h = 0 in s = sqrt(u) for p0 = -1
        u_minus, u_plus = turning_points(half_unit, -0.75)
        assert u_minus == pytest.approx(0.25, abs=1e-14)
        assert u_plus == pytest.approx(2.25, abs=1e-14)

    def test_positive_energy_drops_inner_root(self, half_unit):
        u_minus, u_plus = turning_points(half_unit, 1.0)
        assert u_minus is None
        assert u_plus == pytest.approx((1.0 + math.sqrt(2.0)) ** 2, rel=1e-14)

    def test_degenerate_center(self, half_unit):
        assert turning_points(half_unit, -1.0) == (1.0, 1.0)

    def test_below_center_raises(self, half_unit):
        with pytest.raises(BelowCenterError):
            turning_points(half_unit, -1.5)

    @staticmethod
    def _residual_tol(P, u, h):
        # 1e-12 on the energy plus the conditioning of evaluating V itself,
        # which is a difference of terms that blow up at extreme parameters.
        cond = abs(P.p0) * u + u ** (1.0 - P.alpha) / (1.0 - P.alpha)
        return 1e-12 * max(1.0, abs(h)) + 8e-16 * cond

    @given(alpha=alphas, p0=p0s, frac=st.floats(min_value=0.02, max_value=0.98))
    @settings(max_examples=50, deadline=None)
    def test_residual_and_ordering(self, alpha, p0, frac):
        P = PowerLawPotential(alpha=alpha, p0=p0)
        h = P.h_center * (1.0 - frac)  # inside (h_center, 0)
        u_minus, u_plus = turning_points(P, h)
        assert 0.0 < u_minus < P.u_center < u_plus < P.u_zero
        assert abs(P.value(u_minus) - h) < self._residual_tol(P, u_minus, h)
        assert abs(P.value(u_plus) - h) < self._residual_tol(P, u_plus, h)

    @given(alpha=alphas, p0=p0s, h=st.floats(min_value=0.0, max_value=100.0))
    @settings(max_examples=50, deadline=None)
    def test_bouncing_energies(self, alpha, p0, h):
        P = PowerLawPotential(alpha=alpha, p0=p0)
        u_minus, u_plus = turning_points(P, h)
        assert u_minus is None
        assert u_plus >= P.u_zero * (1.0 - 1e-12)
        assert P.dV(u_plus) > 0.0
        assert abs(P.value(u_plus) - h) < self._residual_tol(P, u_plus, h)


class TestSchaaf:
    def test_closed_form_value(self):
        P = PowerLawPotential(alpha=0.75, p0=-1.0)
        assert schaaf_expression(P, 1.0) == pytest.approx(63.0 / 128.0, rel=1e-12)
        assert schaaf_expression(P, 1.0) > 0.0

    def test_half_alpha_vanishes(self, half_unit):
        for u in (0.1, 1.0, 7.3):
            scale = 0.5**2 * 1.5 * u ** (-5.0)
            assert abs(schaaf_expression(half_unit, u)) < 1e-12 * scale

    def test_quarter_alpha_negative(self):
        P = PowerLawPotential(alpha=0.25, p0=-1.0)
        assert schaaf_expression(P, 1.0) < 0.0

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    def test_matches_closed_form_on_log_grid(self, alpha):
        P = PowerLawPotential(alpha=alpha, p0=-1.0)
        for u in np.geomspace(1e-3, 1e3, 25):
            expr = schaaf_expression(P, float(u))
            ref = schaaf_expression_closed_form(P, float(u))
            scale = alpha**2 * (alpha + 1.0) * u ** (-2.0 * (alpha + 2.0))
            assert abs(expr - ref) <= 1e-10 * scale


class TestSchaafIntegrands:
    def test_psi_limit(self, half_unit):
        _, psi = schaaf_integrands(half_unit, 1e6)
        assert abs(psi - 1.0) < 1e-2

    def test_phi_positive_beyond_center(self):
        P = PowerLawPotential(alpha=0.75, p0=-1.0)
        for u in (1.5, 3.0, 10.0):
            phi, _ = schaaf_integrands(P, u)
            assert phi > 0.0

    def test_center_is_singular(self, half_unit):
        with pytest.raises(DomainError):
            schaaf_integrands(half_unit, half_unit.u_center)


class TestGammaThreshold:
    def test_reference_values(self):
        eta, gamma = gamma_threshold(0.5, -1.9, -2.1)
        assert eta == pytest.approx(0.95**-2, rel=1e-14)
        assert gamma == pytest.approx(math.sqrt(2.0 * 0.2 * 0.95**-2), rel=1e-14)

    def test_simple_values(self):
        eta, gamma = gamma_threshold(0.5, -1.0, -2.0)
        assert eta == pytest.approx(4.0, rel=1e-14)
        assert gamma == pytest.approx(math.sqrt(8.0), rel=1e-14)

    def test_equal_bounds_give_zero(self):
        _, gamma = gamma_threshold(0.5, -1.0, -1.0)
        assert gamma == 0.0

    def test_invalid_bounds(self):
        with pytest.raises(BoundsError):
            gamma_threshold(0.5, 0.1, -1.0)
        with pytest.raises(BoundsError):
            gamma_threshold(0.5, -2.0, -1.0)


@given(
    alpha=alphas,
    p0=p0s,
    frac=st.floats(min_value=-0.4, max_value=0.4),
)
@settings(max_examples=50, deadline=None)
def test_energy_gap_matches_direct_difference(alpha, p0, frac):
    P = PowerLawPotential(alpha=alpha, p0=p0)
    u0 = P.u_center * 1.7
    d = frac * u0
    gap = energy_gap_from(P, u0, d)
    direct = P.value(u0) - P.value(u0 + d)
    assert gap == pytest.approx(direct, rel=1e-10, abs=1e-12)
