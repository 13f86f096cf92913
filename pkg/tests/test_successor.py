import math

import numpy as np
import pytest

from bouncesim import (
    GuardError,
    IterateUndefinedError,
    SectionPoint,
    gamma_ladder,
    gamma_threshold,
    jacobian,
    period_closed_form_half,
    successor,
    successor_iterate,
    twist_profile,
)
from bouncesim.successor import SCAN_TOL

ALPHA = 0.5


class TestSectionPoint:
    def test_speed_must_be_positive(self):
        with pytest.raises(GuardError):
            SectionPoint(0.0, -1.0)

    def test_energy_and_shift(self):
        pt = SectionPoint(1.0, 2.0)
        assert pt.energy == 2.0
        assert pt.shifted(1).t == pytest.approx(1.0 + 2.0 * math.pi)


class TestSuccessorMap:
    def test_autonomous_reference(self, const_forcing):
        # constant forcing: advance is the bouncing period, speed conserved
        s = successor(ALPHA, const_forcing, SectionPoint(0.0, math.sqrt(2.0)))
        assert s.t == pytest.approx(period_closed_form_half(-1.0, 1.0), abs=1e-8)
        assert s.v == pytest.approx(math.sqrt(2.0), abs=1e-9)

    def test_autonomous_speed_conserved_generally(self, const_forcing):
        for v0 in (1.1, 2.7):
            s = successor(ALPHA, const_forcing, SectionPoint(0.4, v0))
            assert s.v == pytest.approx(v0, abs=1e-9)
            assert s.t - 0.4 == pytest.approx(
                period_closed_form_half(-1.0, 0.5 * v0 * v0), abs=1e-8
            )

    def test_lift_periodicity(self, cosine_forcing):
        for t0, v0 in ((0.3, 2.0), (2.1, 4.5)):
            a = successor(ALPHA, cosine_forcing, SectionPoint(t0, v0))
            b = successor(ALPHA, cosine_forcing, SectionPoint(t0 + 2.0 * math.pi, v0))
            assert abs(b.t - a.t - 2.0 * math.pi) < 1e-9
            assert abs(b.v - a.v) < 1e-9

    def test_injectivity_spot_check(self, cosine_forcing):
        images = []
        for t0 in np.linspace(0.0, 2.0 * math.pi, 4, endpoint=False):
            for v0 in (1.5, 2.5, 4.0):
                s = successor(ALPHA, cosine_forcing, SectionPoint(float(t0), v0), tol=SCAN_TOL)
                images.append((s.t % (2.0 * math.pi), s.v))
        for i in range(len(images)):
            for j in range(i + 1, len(images)):
                assert max(abs(images[i][0] - images[j][0]), abs(images[i][1] - images[j][1])) > 1e-6

    def test_guard(self, cosine_forcing):
        _, gamma = gamma_threshold(ALPHA, cosine_forcing.p1, cosine_forcing.p2)
        with pytest.raises(GuardError):
            successor(ALPHA, cosine_forcing, SectionPoint(0.0, 0.99 * gamma))


class TestIterate:
    def test_single_iterate_matches_successor(self, cosine_forcing):
        pt = SectionPoint(0.5, 3.0)
        end1, inter = successor_iterate(ALPHA, cosine_forcing, pt, 1)
        s = successor(ALPHA, cosine_forcing, pt)
        assert end1.t == pytest.approx(s.t, abs=1e-12)
        assert inter == [pt]

    def test_autonomous_triple_advance(self, const_forcing):
        pt = SectionPoint(0.0, math.sqrt(2.0))
        end, inter = successor_iterate(ALPHA, const_forcing, pt, 3)
        tb = period_closed_form_half(-1.0, 1.0)
        assert end.t == pytest.approx(3.0 * tb, abs=1e-7)
        assert len(inter) == 3

    def test_intermediate_speeds_exceed_base_threshold(self, cosine_forcing):
        ladder = gamma_ladder(ALPHA, cosine_forcing.p1, cosine_forcing.p2, 3)
        _, inter = successor_iterate(ALPHA, cosine_forcing, SectionPoint(0.0, ladder.top * 1.2), 3)
        _, gamma = gamma_threshold(ALPHA, cosine_forcing.p1, cosine_forcing.p2)
        assert all(p.v > gamma for p in inter)

    def test_guard_violation_carries_index(self, cosine_forcing):
        _, gamma = gamma_threshold(ALPHA, cosine_forcing.p1, cosine_forcing.p2)
        with pytest.raises(IterateUndefinedError) as err:
            successor_iterate(ALPHA, cosine_forcing, SectionPoint(0.0, 0.9 * gamma), 2)
        assert err.value.index == 0
        with pytest.raises(ValueError):
            successor_iterate(ALPHA, cosine_forcing, SectionPoint(0.0, 3.0), 0)

    def test_mid_iterate_failure_index(self, cosine_forcing):
        # launch barely above gamma: a later rebound falls below it
        _, gamma = gamma_threshold(ALPHA, cosine_forcing.p1, cosine_forcing.p2)
        with pytest.raises(IterateUndefinedError) as err:
            successor_iterate(ALPHA, cosine_forcing, SectionPoint(2.356194, gamma * 1.01), 3, tol=SCAN_TOL)
        assert 1 <= err.value.index <= 2


class TestGammaLadder:
    def test_reference_recursion(self):
        # outer root of 1.9*u - 2*sqrt(u) = 0.245 via the explicit quadratic
        lad = gamma_ladder(ALPHA, -1.9, -2.1, 2, gamma1_margin=0.7 - math.sqrt(2.0 * 0.2 * 0.95**-2))
        s = (2.0 + math.sqrt(4.0 + 4.0 * 1.9 * 0.245)) / (2.0 * 1.9)
        u1 = s * s
        gamma2 = math.sqrt(0.49 + 2.0 * 0.2 * u1)
        assert lad.thresholds[0] == pytest.approx(0.7, rel=1e-12)
        assert lad.thresholds[1] == pytest.approx(gamma2, rel=1e-12)
        assert u1 == pytest.approx(1.3536445286, rel=1e-9)

    def test_constant_when_bounds_equal(self):
        lad = gamma_ladder(ALPHA, -1.0, -1.0, 4, gamma1_margin=0.25)
        assert all(g == 0.25 for g in lad.thresholds)

    def test_strictly_increasing_when_spread(self):
        lad = gamma_ladder(ALPHA, -1.9, -2.1, 5)
        assert all(b > a for a, b in zip(lad.thresholds, lad.thresholds[1:]))


class TestJacobian:
    def test_autonomous_shear(self, const_forcing):
        # S(t, E) = (t + T_b(E), E): unit determinant, dT_b/dE upper entry
        rep = jacobian(ALPHA, const_forcing, SectionPoint(0.0, math.sqrt(2.0)))
        assert abs(rep.det_tE - 1.0) < 1e-5
        assert abs(rep.det_tv - 1.0) < 1e-5
        # analytic derivative of the closed form at h=1, p0=-1
        dTb = math.sqrt(2.0) * math.sqrt(1.0) / (1.0 + 1.0)
        assert rep.J[0, 1] == pytest.approx(dTb, rel=1e-4)
        assert rep.J[0, 0] == pytest.approx(1.0, abs=1e-5)
        assert rep.J[1, 0] == pytest.approx(0.0, abs=1e-5)
        assert rep.J[1, 1] == pytest.approx(1.0, abs=1e-5)

    def test_nonautonomous_unit_determinant_in_tE(self, cosine_forcing):
        rep = jacobian(ALPHA, cosine_forcing, SectionPoint(0.7, 4.0))
        assert abs(rep.det_tE - 1.0) < 1e-4
        # the (t, v) determinant differs by the exact speed ratio
        assert rep.det_tv != pytest.approx(rep.det_tE, abs=1e-6)

    def test_richardson_consistency(self, const_forcing):
        pt = SectionPoint(0.0, 2.0)
        d1 = jacobian(ALPHA, const_forcing, pt, fd_step=2e-5).det_tE
        d2 = jacobian(ALPHA, const_forcing, pt, fd_step=1e-5).det_tE
        assert abs(d2 - 1.0) < 4.0 * max(abs(d1 - 1.0), 1e-7)


class TestTwist:
    def test_autonomous_profile_independent_of_t0(self, const_forcing):
        from bouncesim.successor import TIGHT_TOL

        prof = twist_profile(
            ALPHA, const_forcing,
            np.linspace(0.0, 2.0 * math.pi, 5, endpoint=False),
            np.array([1.5, 3.0]),
            n=1, m=1, tol=TIGHT_TOL,
        )
        assert prof.defined.all()
        spread = np.max(prof.delta, axis=0) - np.min(prof.delta, axis=0)
        assert np.all(spread < 1e-7)

    def test_divergence_in_speed(self, cosine_forcing):
        _, gamma = gamma_threshold(ALPHA, cosine_forcing.p1, cosine_forcing.p2)
        t0s = np.linspace(0.0, 2.0 * math.pi, 6, endpoint=False)
        prof = twist_profile(ALPHA, cosine_forcing, t0s, np.array([2.0 * gamma, 10.0 * gamma]), n=1, m=1)
        assert np.all(prof.delta[:, 1] > prof.delta[:, 0])
        # rotation bound from the forcing floor: v0 < -p2 * (t1 - t0)
        for i, t0 in enumerate(t0s):
            advance = prof.delta[i, 0] + 2.0 * math.pi
            assert 2.0 * gamma < -cosine_forcing.p2 * advance

    def test_negative_near_floor_for_large_m(self, cosine_forcing):
        _, gamma = gamma_threshold(ALPHA, cosine_forcing.p1, cosine_forcing.p2)
        prof = twist_profile(
            ALPHA, cosine_forcing,
            np.array([0.0, 2.0]), np.array([gamma + 1.0]), n=1, m=3,
        )
        assert np.all(prof.delta < 0.0)

    def test_undefined_cells_flagged(self, cosine_forcing):
        _, gamma = gamma_threshold(ALPHA, cosine_forcing.p1, cosine_forcing.p2)
        prof = twist_profile(
            ALPHA, cosine_forcing,
            np.array([0.0]), np.array([0.5 * gamma, 3.0]), n=1, m=1,
        )
        assert not prof.defined[0, 0]
        assert prof.defined[0, 1]
