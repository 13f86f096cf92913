"""Extended period function of the autonomous power-law oscillator.

The closed orbits at energies h_center < h < 0 have a classical period

    T_p(h) = sqrt(2) * int du / sqrt(h - V(u))   over [u_minus(h), u_plus(h)],

while energies h >= 0 bounce off the singularity and the same integral taken
from u = 0 gives the time between consecutive collisions,

    T_b(h) = sqrt(2) * int_0^{u_plus(h)} du / sqrt(h - V(u)).

Gluing the two branches at h = 0 yields the extended period function T(h).
Both integrals have inverse-square-root turning-point singularities; they are
computed with tanh-sinh quadrature on subintervals split so that each singular
endpoint is resolved through a cancellation-free energy gap.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, BelowCenterError, DomainError, QuadratureError, RegimeError
from .potential import PowerLawPotential, energy_gap_from, turning_points
from .quadrature import tanh_sinh

__all__ = [
    "Regime",
    "PeriodSample",
    "ScanReport",
    "period_classical",
    "period_bouncing",
    "period_extended",
    "period_closed_form_half",
    "period_derivative",
    "monotonicity_scan",
]

# Below this energy offset from the center the orbit is indistinguishable from
# the harmonic linearization and the quadrature degenerates.
_CENTER_CUTOFF = 1e-8

_SQRT2 = math.sqrt(2.0)


class Regime(enum.Enum):
    CLASSICAL = "classical"
    BOUNCING = "bouncing"


@dataclass(frozen=True)
class PeriodSample:
    h: float
    T: float
    regime: Regime
    quadrature_error_estimate: float


def _gap_closure(P: PowerLawPotential, h: float, a: float, b: float, lo_rule, hi_rule):
    """Integrand 1/sqrt(h - V(u)) with endpoint-aware gap evaluation.

    ``lo_rule``/``hi_rule`` describe how to evaluate the energy gap near that
    endpoint: ("turn", u0) for a turning point (gap vanishes there),
    ("zref", u0) for a reference with V(u0) = 0 (gap = h there), ("origin",)
    for the singular endpoint u = 0, or None for direct evaluation.
    """
    span = b - a
    q = 1.0 - P.alpha

    def side_gap(rule, d_signed):
        kind = rule[0]
        if kind == "origin":
            u = d_signed  # distance from 0 is the abscissa itself
            return h + P.p0 * u + u**q / q
        u0 = rule[1]
        base = 0.0 if kind == "turn" else h
        return base + energy_gap_from(P, u0, d_signed)

    def f(x, d_lo, d_hi):
        # np.where evaluates both branches; masked-out lanes may produce
        # inf/nan that the select discards, so silence those warnings.
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return _eval(x, d_lo, d_hi)

    def _eval(x, d_lo, d_hi):
        gap = None
        if lo_rule is not None and hi_rule is not None:
            near_lo = d_lo <= 0.5 * span
            gap = np.where(
                near_lo,
                side_gap(lo_rule, d_lo),
                side_gap(hi_rule, -d_hi),
            )
        elif lo_rule is not None:
            near_lo = d_lo <= 0.5 * span
            gap = np.where(near_lo, side_gap(lo_rule, d_lo), h - P.value(np.maximum(x, 1e-300)))
        elif hi_rule is not None:
            near_hi = d_hi <= 0.5 * span
            gap = np.where(near_hi, side_gap(hi_rule, -d_hi), h - P.value(np.maximum(x, 1e-300)))
        else:
            gap = h - P.value(x)
        if np.any(gap <= 0.0):
            raise QuadratureError(
                f"energy gap non-positive inside [{a}, {b}] at h={h}; "
                "integrand evaluation lost positivity"
            )
        return 1.0 / np.sqrt(gap)

    return f


def _harmonic_sample(P: PowerLawPotential, h: float, regime: Regime) -> PeriodSample:
    T = 2.0 * math.pi / math.sqrt(P.d2V(P.u_center))
    return PeriodSample(h=h, T=T, regime=regime, quadrature_error_estimate=abs(h - P.h_center))


def period_classical(P: PowerLawPotential, h: float, tol: float = 1e-10) -> PeriodSample:
    """Full period of the closed orbit at energy h in (h_center, 0)."""
    hc = P.h_center
    if h <= hc:
        raise BelowCenterError(f"h={h} at or below center energy {hc}")
    if h >= 0.0:
        raise RegimeError(f"h={h} is in the bouncing regime; classical needs h < 0")
    if h - hc < _CENTER_CUTOFF:
        return _harmonic_sample(P, h, Regime.CLASSICAL)

    u_minus, u_plus = turning_points(P, h)
    uc = P.u_center
    piece_tol = tol / (2.0 * _SQRT2)
    left = tanh_sinh(
        _gap_closure(P, h, u_minus, uc, ("turn", u_minus), None),
        u_minus, uc, abs_tol=piece_tol, rel_tol=1e-13,
    )
    right = tanh_sinh(
        _gap_closure(P, h, uc, u_plus, None, ("turn", u_plus)),
        uc, u_plus, abs_tol=piece_tol, rel_tol=1e-13,
    )
    T = _SQRT2 * (left.value + right.value)
    err = _SQRT2 * (left.error + right.error)
    return PeriodSample(h=h, T=T, regime=Regime.CLASSICAL, quadrature_error_estimate=err)


def period_bouncing(P: PowerLawPotential, h: float, tol: float = 1e-10) -> PeriodSample:
    """Time between consecutive collisions at energy h >= 0."""
    if h < 0.0:
        raise RegimeError(f"h={h} is in the classical regime; bouncing needs h >= 0")
    piece_tol = tol / (2.0 * _SQRT2)
    beta = P.u_zero

    if h == 0.0:
        # Both endpoints singular: u = 0 carries the weak singularity of V,
        # u_plus = beta is a turning point.  Split at the interior center.
        uc = P.u_center
        left = tanh_sinh(
            _gap_closure(P, h, 0.0, uc, ("origin",), None),
            0.0, uc, abs_tol=piece_tol, rel_tol=1e-13,
        )
        right = tanh_sinh(
            _gap_closure(P, h, uc, beta, None, ("turn", beta)),
            uc, beta, abs_tol=piece_tol, rel_tol=1e-13,
        )
    else:
        _, u_plus = turning_points(P, h)
        left = tanh_sinh(
            _gap_closure(P, h, 0.0, beta, ("origin",), ("zref", beta)),
            0.0, beta, abs_tol=piece_tol, rel_tol=1e-13,
        )
        right = tanh_sinh(
            _gap_closure(P, h, beta, u_plus, ("zref", beta), ("turn", u_plus)),
            beta, u_plus, abs_tol=piece_tol, rel_tol=1e-13,
        )
    T = _SQRT2 * (left.value + right.value)
    err = _SQRT2 * (left.error + right.error)
    return PeriodSample(h=h, T=T, regime=Regime.BOUNCING, quadrature_error_estimate=err)


def period_extended(P: PowerLawPotential, h: float, tol: float = 1e-10) -> PeriodSample:
    """Dispatch to the classical or bouncing branch by the sign of h."""
    if h < 0.0:
        return period_classical(P, h, tol=tol)
    return period_bouncing(P, h, tol=tol)


def period_closed_form_half(p0: float, h: float) -> float:
    """Exact extended period for alpha = 1/2; quadrature oracle.

    Constant 2*sqrt(2)*pi/(-p0)**1.5 on the closed orbits and

        T_b(h) = 2*sqrt(2)/(-p0)**1.5 * (pi/2 + atan(1/sqrt(-p0*h)))
                 - 2*sqrt(2*h)/p0

    for h >= 0.
    """
    if p0 >= 0.0:
        raise DomainError(f"p0 must be negative, got {p0}")
    q = -p0
    h_center = -1.0 / q
    if h <= h_center:
        raise BelowCenterError(f"h={h} at or below center energy {h_center}")
    c = 2.0 * _SQRT2 / q**1.5
    if h < 0.0:
        return c * math.pi
    if h == 0.0:
        return c * math.pi
    return c * (0.5 * math.pi + math.atan(1.0 / math.sqrt(q * h))) + 2.0 * math.sqrt(2.0 * h) / q


def period_derivative(
    P: PowerLawPotential,
    h: float,
    step: float,
    side: str = "auto",
    tol: float = 1e-12,
) -> float:
    """Finite-difference estimate of T'(h).

    Central differencing by default; at the regime boundary h = 0 the stencil
    must stay on one side, so ``side`` selects "left" or "right" (default
    right).  A step that would cross the boundary or fall out of the domain
    raises AccuracyError.
    """
    if step <= 0.0:
        raise AccuracyError(f"step must be positive, got {step}")
    hc = P.h_center
    T = lambda x: period_extended(P, x, tol=tol).T

    if side == "auto":
        side = "right" if h == 0.0 else "central"
    if side == "central":
        if h - step <= hc + _CENTER_CUTOFF:
            raise AccuracyError(f"step {step} reaches the center energy from h={h}")
        if h < 0.0 < h + step or h - step < 0.0 < h:
            raise AccuracyError(f"stencil [{h - step}, {h + step}] crosses the regime boundary")
        return (T(h + step) - T(h - step)) / (2.0 * step)
    if side == "right":
        return (T(h + step) - T(h)) / step
    if side == "left":
        if h - step <= hc + _CENTER_CUTOFF:
            raise AccuracyError(f"step {step} reaches the center energy from h={h}")
        return (T(h) - T(h - step)) / step
    raise ValueError(f"side must be 'auto', 'central', 'left' or 'right', got {side!r}")


@dataclass(frozen=True)
class ScanReport:
    """Sign pattern of successive period differences over an energy grid."""

    h: np.ndarray
    T: np.ndarray
    signs: np.ndarray  # one entry per grid gap: +1, -1 or 0 within tolerance
    runs: tuple  # ((label, h_first, h_last), ...) run-length compressed
    kind: str  # increasing | decreasing | constant | mixed
    pattern: str  # e.g. "constant->increasing"
    crossings: tuple  # h-intervals bracketing each sign change
    h_increasing_from: float | None  # start of the trailing increasing run

    def samples(self) -> list[PeriodSample]:
        out = []
        for h, T in zip(self.h, self.T):
            regime = Regime.CLASSICAL if h < 0 else Regime.BOUNCING
            out.append(PeriodSample(float(h), float(T), regime, 0.0))
        return out


_RUN_LABEL = {1: "increasing", -1: "decreasing", 0: "constant"}


def monotonicity_scan(
    P: PowerLawPotential,
    h_grid,
    atol: float | None = None,
    tol: float = 1e-10,
) -> ScanReport:
    """Classify the monotonicity of T over a strictly increasing energy grid.

    Differences smaller than ``atol`` in magnitude count as zero; the default
    ties the tolerance to the magnitude of T so the isochronous branch is
    reported constant despite quadrature noise.
    """
    h = np.asarray(h_grid, dtype=float)
    if h.size < 3:
        raise ValueError(f"grid must have at least 3 points, got {h.size}")
    if not np.all(np.diff(h) > 0.0):
        raise ValueError("grid must be strictly increasing")
    T = np.array([period_extended(P, float(x), tol=tol).T for x in h])
    if atol is None:
        atol = 1e-7 * max(1.0, float(np.max(np.abs(T))))

    diffs = np.diff(T)
    signs = np.where(np.abs(diffs) <= atol, 0, np.sign(diffs)).astype(int)

    runs = []
    boundaries = []  # grid index where consecutive runs meet
    start = 0
    for i in range(1, signs.size + 1):
        if i == signs.size or signs[i] != signs[start]:
            runs.append((_RUN_LABEL[int(signs[start])], float(h[start]), float(h[i])))
            if i < signs.size:
                boundaries.append(i)
            start = i
    crossings = tuple((float(h[m - 1]), float(h[m + 1])) for m in boundaries)
    if len(runs) == 1:
        kind = runs[0][0]
    else:
        kind = "mixed"
    pattern = "->".join(r[0] for r in runs)
    h_inc = runs[-1][1] if runs[-1][0] == "increasing" else None
    return ScanReport(
        h=h, T=T, signs=signs, runs=tuple(runs), kind=kind,
        pattern=pattern, crossings=crossings, h_increasing_from=h_inc,
    )
