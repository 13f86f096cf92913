"""Successor map on the collision section and its diagnostics.

A section point is a collision instant together with the outgoing speed.  The
successor map S sends it to the next collision, S(t0, v0) = (t1, -u'(t1-)),
and is well defined for launch speeds above the certification threshold
gamma.  The time coordinate is a lift: S(t0 + 2*pi, v0) = S(t0, v0) + (2*pi, 0).

The map is evaluated by composing an outgoing crossing, a classical arc and
an incoming crossing.  Finite-difference Jacobians in time-energy coordinates
(t, E = v**2/2) probe the area-preservation of S; the rotation-discrepancy
field S1^n - t0 - 2*m*pi locates twist annuli for the periodic-orbit search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GuardError, IterateUndefinedError, NoCollisionError
from .forcing import Forcing
from .integrator import cross_collision, default_delta, integrate_classical, singular_part
from .potential import PowerLawPotential, gamma_threshold, turning_points

__all__ = [
    "SectionPoint",
    "GammaLadder",
    "successor",
    "successor_iterate",
    "gamma_ladder",
    "jacobian",
    "JacobianReport",
    "twist_profile",
    "TwistProfile",
    "TIGHT_TOL",
    "SCAN_TOL",
]

# (rtol, atol) tiers: scans only need enough accuracy to seed Newton, while
# Jacobians difference the map at 1e-5 steps and need a much lower noise floor.
TIGHT_TOL = (1e-12, 1e-13)
SCAN_TOL = (1e-6, 1e-8)


@dataclass(frozen=True)
class SectionPoint:
    """Point (t, v) on the collision section {u = 0, outgoing speed v > 0}."""

    t: float
    v: float

    def __post_init__(self):
        if not self.v > 0.0:
            raise GuardError(f"section points need outgoing speed v > 0, got {self.v}")

    @property
    def energy(self) -> float:
        return 0.5 * self.v * self.v

    def shifted(self, periods: int) -> "SectionPoint":
        return SectionPoint(self.t + 2.0 * math.pi * periods, self.v)


def successor(
    alpha: float,
    F: Forcing,
    pt: SectionPoint,
    delta: float | None = None,
    tol: tuple[float, float] = TIGHT_TOL,
) -> SectionPoint:
    """One application of the successor map.

    Raises GuardError when pt.v is not above gamma, and NoCollisionError if
    the arc fails to return to the section (possible only for uncertified
    speeds).
    """
    _, gamma = gamma_threshold(alpha, F.p1, F.p2)
    if not pt.v > gamma:
        raise GuardError(f"launch speed {pt.v} not above threshold gamma={gamma}")
    if delta is None:
        delta = default_delta(alpha, F.p1)
    rtol, atol = tol

    out = cross_collision(alpha, F, pt.t, pt.energy, "outgoing", delta, rtol=rtol, atol=max(atol, 1e-14))
    # Bouncing time grows like 2*v/|p|; the budget is a generous multiple.
    t_budget = out.t + 4.0 * (2.0 * out.v / (-F.p1) + 2.0 * math.pi) + 20.0
    _, exit_reason, state = integrate_classical(
        alpha, F, out.t, out.u, out.v, t_budget,
        delta=delta, rtol=rtol, atol=atol, dense=False,
    )
    if exit_reason != "approaching-collision":
        raise NoCollisionError(f"arc launched at {pt} did not return to the section", state=state)
    t_d, u_d, v_d = state
    w_in = 0.5 * v_d * v_d + singular_part(alpha, u_d)
    hit = cross_collision(alpha, F, t_d, w_in, "incoming", delta, rtol=rtol, atol=max(atol, 1e-14))
    return SectionPoint(t=hit.t, v=-hit.v)


def successor_iterate(
    alpha: float,
    F: Forcing,
    pt: SectionPoint,
    n: int,
    delta: float | None = None,
    tol: tuple[float, float] = TIGHT_TOL,
) -> tuple[SectionPoint, list[SectionPoint]]:
    """n-fold composition of the successor map.

    Returns the final point and all intermediate section points (including the
    start, excluding the end).  A guard violation at step k raises
    IterateUndefinedError with index k.
    """
    if n < 1:
        raise ValueError(f"iterate count must be >= 1, got {n}")
    _, gamma = gamma_threshold(alpha, F.p1, F.p2)
    intermediates = []
    cur = pt
    for k in range(n):
        if not cur.v > gamma:
            raise IterateUndefinedError(
                f"speed {cur.v} fell to the threshold gamma={gamma} at iterate {k}", index=k
            )
        intermediates.append(cur)
        try:
            cur = successor(alpha, F, cur, delta=delta, tol=tol)
        except NoCollisionError as exc:
            raise IterateUndefinedError(
                f"iterate {k} failed to reach the section: {exc}", index=k
            ) from exc
    return cur, intermediates


@dataclass(frozen=True)
class GammaLadder:
    """Speed thresholds gamma_1 < ... < gamma_n certifying successive impacts."""

    thresholds: tuple[float, ...]

    def __post_init__(self):
        if any(b < a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValueError("ladder thresholds must be non-decreasing")

    @property
    def top(self) -> float:
        return self.thresholds[-1]

    def __len__(self):
        return len(self.thresholds)


def gamma_ladder(
    alpha: float,
    p1: float,
    p2: float,
    n: int,
    gamma1_margin: float | None = None,
) -> GammaLadder:
    """Thresholds gamma_1..gamma_n such that v0 > gamma_n yields >= n impacts.

    gamma_1 = gamma + margin.  Each step intersects the level of the mild
    constant system through (0, gamma_k) with the u-axis at the outer abscissa
    u_k, and lifts the energy by the forcing spread across it:
    gamma_{k+1} = sqrt(gamma_k**2 + 2*(p1 - p2)*u_k).  The ladder is constant
    when p1 = p2.
    """
    if n < 1:
        raise ValueError(f"ladder length must be >= 1, got {n}")
    _, gamma = gamma_threshold(alpha, p1, p2)
    if gamma1_margin is None:
        gamma1_margin = 1e-3 * gamma if gamma > 0.0 else 1e-3
    if gamma1_margin <= 0.0:
        raise ValueError("gamma1_margin must be positive to stay inside the open domain")
    P1 = PowerLawPotential(alpha=alpha, p0=p1)
    spread = 2.0 * (p1 - p2)
    g = gamma + gamma1_margin
    thresholds = [g]
    for _ in range(n - 1):
        _, u_k = turning_points(P1, 0.5 * g * g)
        g = math.sqrt(g * g + spread * u_k)
        thresholds.append(g)
    return GammaLadder(thresholds=tuple(thresholds))


@dataclass(frozen=True)
class JacobianReport:
    """Central-difference Jacobian of the n-th iterate in (t, E) coordinates."""

    J: np.ndarray  # 2x2, rows (t1, E1), columns (t0, E0)
    det_tE: float
    det_tv: float
    fd_step: float
    n: int


def _iterate_tE(alpha, F, t, E, n, delta, tol):
    pt, _ = successor_iterate(alpha, F, SectionPoint(t, math.sqrt(2.0 * E)), n, delta=delta, tol=tol)
    return pt


def jacobian(
    alpha: float,
    F: Forcing,
    pt: SectionPoint,
    n: int = 1,
    fd_step: float = 1e-5,
    delta: float | None = None,
    tol: tuple[float, float] = TIGHT_TOL,
    max_shrink: int = 3,
) -> JacobianReport:
    """Finite-difference Jacobian of S^n at pt in time-energy coordinates.

    The (t, v)-coordinate determinant is reported alongside: with E = v**2/2
    it differs from det J_(t,E) by the exact factor v0/v1.  Guard violations
    at perturbed points shrink the step up to ``max_shrink`` times.
    """
    t0, E0 = pt.t, pt.energy
    step = fd_step
    for attempt in range(max_shrink + 1):
        dt = step * max(1.0, abs(t0))
        dE = step * max(1.0, E0)
        try:
            center = _iterate_tE(alpha, F, t0, E0, n, delta, tol)
            p_tp = _iterate_tE(alpha, F, t0 + dt, E0, n, delta, tol)
            p_tm = _iterate_tE(alpha, F, t0 - dt, E0, n, delta, tol)
            p_Ep = _iterate_tE(alpha, F, t0, E0 + dE, n, delta, tol)
            p_Em = _iterate_tE(alpha, F, t0, E0 - dE, n, delta, tol)
        except (GuardError, IterateUndefinedError):
            step *= 0.5
            if attempt == max_shrink:
                raise
            continue
        J = np.array(
            [
                [(p_tp.t - p_tm.t) / (2.0 * dt), (p_Ep.t - p_Em.t) / (2.0 * dE)],
                [(p_tp.energy - p_tm.energy) / (2.0 * dt), (p_Ep.energy - p_Em.energy) / (2.0 * dE)],
            ]
        )
        det_tE = float(np.linalg.det(J))
        det_tv = det_tE * pt.v / center.v
        return JacobianReport(J=J, det_tE=det_tE, det_tv=det_tv, fd_step=step, n=n)
    raise GuardError("jacobian step shrink exhausted")  # pragma: no cover


@dataclass(frozen=True)
class TwistProfile:
    """Rotation discrepancy Delta = S1^n - t0 - 2*m*pi over a section grid."""

    t0: np.ndarray
    v0: np.ndarray
    delta: np.ndarray  # shape (len(t0), len(v0)); NaN where the iterate is undefined
    n: int
    m: int

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.delta)


def twist_profile(
    alpha: float,
    F: Forcing,
    t0_grid,
    v_grid,
    n: int = 1,
    m: int = 1,
    delta: float | None = None,
    tol: tuple[float, float] = SCAN_TOL,
) -> TwistProfile:
    """Evaluate the rotation-discrepancy field on the product grid."""
    t0_grid = np.asarray(t0_grid, dtype=float)
    v_grid = np.asarray(v_grid, dtype=float)
    if delta is None:
        delta = default_delta(alpha, F.p1)
    out = np.full((t0_grid.size, v_grid.size), np.nan)
    shift = 2.0 * math.pi * m
    for i, t0 in enumerate(t0_grid):
        for j, v0 in enumerate(v_grid):
            try:
                end, _ = successor_iterate(alpha, F, SectionPoint(float(t0), float(v0)), n, delta=delta, tol=tol)
            except (GuardError, IterateUndefinedError, NoCollisionError):
                continue
            out[i, j] = end.t - t0 - shift
    return TwistProfile(t0=t0_grid, v0=v_grid, delta=out, n=n, m=m)
