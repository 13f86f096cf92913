"""Search for 2*m*pi-periodic bouncing solutions with exactly n impacts.

Such solutions are fixed points of S^n - (2*m*pi, 0) on the collision
section.  The finder scans the rotation discrepancy Delta1 = S1^n - t0 -
2*m*pi and the speed discrepancy Delta2 = S2^n - v0 on a section grid,
seeds a damped least-squares Newton solve in every sign-structured cell,
deduplicates the converged roots modulo the 2*pi lift shift, and verifies
each orbit by reintegration over two full periods.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GuardError, IterateUndefinedError, NoCollisionError, NumericalError
from .forcing import Forcing
from .integrator import continue_bouncing
from .period import period_bouncing
from .potential import PowerLawPotential
from .successor import (
    SCAN_TOL,
    TIGHT_TOL,
    SectionPoint,
    gamma_ladder,
    successor_iterate,
)

__all__ = [
    "PeriodicOrbit",
    "FinderOptions",
    "find_orbits",
    "minimal_m",
    "verify_orbit",
    "VerificationReport",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PeriodicOrbit:
    """Fixed point of S^n - (2*m*pi, 0) with its impact data."""

    m: int
    n: int
    section_point: SectionPoint
    impact_times: tuple[float, ...]
    impact_speeds: tuple[float, ...]
    residual: float
    orbit_class: int = 0  # fixed points on a common trajectory share a class

    @property
    def t0(self) -> float:
        return self.section_point.t

    @property
    def v0(self) -> float:
        return self.section_point.v

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "t0": self.t0,
            "v0": self.v0,
            "impact_times": list(self.impact_times),
            "impact_speeds": list(self.impact_speeds),
            "residual": self.residual,
            "orbit_class": self.orbit_class,
        }


@dataclass(frozen=True)
class FinderOptions:
    grid_t0: int = 64
    grid_v: int = 128
    residual_ok: float = 1e-10
    step_ok: float = 1e-12
    max_newton: int = 25
    max_backtrack: int = 30
    fd_step: float = 1e-5
    dedup_radius: float = 1e-6
    guard_margin: float = 1e-3


def _residual_fn(alpha, F, m, n, tol):
    shift = _TWO_PI * m

    def R(t0, v0):
        end, _ = successor_iterate(alpha, F, SectionPoint(t0, v0), n, tol=tol)
        return np.array([end.t - t0 - shift, end.v - v0])

    return R


def _newton_polish(alpha, F, m, n, t0, v0, v_floor, opts: FinderOptions):
    """Damped least-squares Newton on (Delta1, Delta2) = 0 from a seed."""
    R = _residual_fn(alpha, F, m, n, TIGHT_TOL)
    x = np.array([t0, v0])
    try:
        r = R(*x)
    except (GuardError, IterateUndefinedError, NoCollisionError):
        return None
    for _ in range(opts.max_newton):
        rnorm = float(np.max(np.abs(r)))
        if rnorm < opts.residual_ok:
            return x, rnorm
        dt = opts.fd_step * max(1.0, abs(x[0]))
        dv = opts.fd_step * max(1.0, x[1])
        try:
            J = np.column_stack(
                [
                    (R(x[0] + dt, x[1]) - R(x[0] - dt, x[1])) / (2.0 * dt),
                    (R(x[0], x[1] + dv) - R(x[0], x[1] - dv)) / (2.0 * dv),
                ]
            )
        except (GuardError, IterateUndefinedError, NoCollisionError):
            return None
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        lam = 1.0
        for _ in range(opts.max_backtrack):
            x_try = x + lam * step
            if x_try[1] > v_floor:
                try:
                    r_try = R(*x_try)
                except (GuardError, IterateUndefinedError, NoCollisionError):
                    r_try = None
                if r_try is not None and np.max(np.abs(r_try)) < np.max(np.abs(r)):
                    x, r = x_try, r_try
                    break
            lam *= 0.5
        else:
            return None  # no descent direction: discard the candidate
        if float(np.max(np.abs(lam * step))) < opts.step_ok and float(np.max(np.abs(r))) < opts.residual_ok:
            break
    rnorm = float(np.max(np.abs(r)))
    if rnorm < opts.residual_ok:
        return x, rnorm
    return None


def _sign_structured_cells(d1, d2, v_scale):
    """Indices (i, j) of grid cells whose corners change sign in both residuals.

    A residual that is flat zero across the cell (the degenerate autonomous
    case) counts as sign-changing.  The t0 direction wraps around.
    """
    nt, nv = d1.shape
    seeds = []
    for i in range(nt):
        i2 = (i + 1) % nt
        for j in range(nv - 1):
            c1 = np.array([d1[i, j], d1[i2, j], d1[i, j + 1], d1[i2, j + 1]])
            c2 = np.array([d2[i, j], d2[i2, j], d2[i, j + 1], d2[i2, j + 1]])
            if np.any(np.isnan(c1)) or np.any(np.isnan(c2)):
                continue
            change1 = c1.min() < 0.0 < c1.max()
            change2 = c2.min() < 0.0 < c2.max() or np.all(np.abs(c2) < 1e-6 * v_scale)
            if change1 and change2:
                seeds.append((i, j))
    return seeds


def _autonomous_speed_bracket(alpha, F, m, n):
    """Speed solving n*T_b(E) = 2*m*pi for the mid constant forcing, if any."""
    P = PowerLawPotential(alpha=alpha, p0=0.5 * (F.p1 + F.p2))
    target = _TWO_PI * m / n

    def f(E):
        return period_bouncing(P, E, tol=1e-8).T - target

    E_lo, E_hi = 1e-6, 1.0
    while f(E_hi) < 0.0 and E_hi < 1e8:
        E_hi *= 2.0
    if f(E_lo) > 0.0 or E_hi >= 1e8:
        return None
    from scipy.optimize import brentq

    E_star = brentq(f, E_lo, E_hi, xtol=1e-12, rtol=1e-12)
    return math.sqrt(2.0 * E_star)


def find_orbits(
    alpha: float,
    F: Forcing,
    m: int,
    n: int,
    search_box: tuple[float, float] | None = None,
    opts: FinderOptions | None = None,
) -> list[PeriodicOrbit]:
    """Locate verified-residual fixed points of S^n - (2*m*pi, 0).

    ``search_box`` is the speed range (v_lo, v_hi); it must sit above the
    ladder threshold gamma_n and defaults to a band around the speed whose
    autonomous bouncing period matches the target rotation.  Orbits are
    deduplicated modulo the 2*pi shift in t0 and sorted by (t0 mod 2*pi, v0).
    """
    if m < 1 or n < 1:
        raise ValueError(f"m and n must be >= 1, got m={m}, n={n}")
    opts = opts or FinderOptions()
    ladder = gamma_ladder(alpha, F.p1, F.p2, n)
    v_floor = ladder.top * (1.0 + opts.guard_margin) if ladder.top > 0 else opts.guard_margin

    if search_box is None:
        v_star = _autonomous_speed_bracket(alpha, F, m, n)
        if v_star is None:
            v_lo, v_hi = v_floor, max(8.0 * v_floor, 1.0)
        else:
            v_lo = max(v_floor, 0.45 * v_star)
            v_hi = max(2.2 * v_star, v_floor * 1.5)
    else:
        v_lo, v_hi = search_box
        if v_lo <= ladder.top:
            raise GuardError(
                f"search box speed floor {v_lo} is not above the ladder threshold {ladder.top}"
            )

    t0s = np.linspace(0.0, _TWO_PI, opts.grid_t0, endpoint=False)
    vs = np.geomspace(v_lo, v_hi, opts.grid_v)

    shift = _TWO_PI * m
    d1 = np.full((t0s.size, vs.size), np.nan)
    d2 = np.full_like(d1, np.nan)
    for i, t0 in enumerate(t0s):
        for j, v0 in enumerate(vs):
            try:
                end, _ = successor_iterate(alpha, F, SectionPoint(float(t0), float(v0)), n, tol=SCAN_TOL)
            except (GuardError, IterateUndefinedError, NoCollisionError):
                continue
            d1[i, j] = end.t - t0 - shift
            d2[i, j] = end.v - v0

    roots = []
    for i, j in _sign_structured_cells(d1, d2, v_scale=max(1.0, v_lo)):
        t_seed = t0s[i] + 0.5 * (_TWO_PI / opts.grid_t0)
        v_seed = math.sqrt(vs[j] * vs[j + 1])
        got = _newton_polish(alpha, F, m, n, float(t_seed), float(v_seed), v_floor, opts)
        if got is not None:
            roots.append(got)

    # Deduplicate modulo the 2*pi lift shift, keeping the best residual.
    kept = []
    for x, rnorm in sorted(roots, key=lambda item: item[1]):
        t_mod = x[0] % _TWO_PI
        duplicate = False
        for y, _ in kept:
            dt = abs(t_mod - y[0] % _TWO_PI)
            dt = min(dt, _TWO_PI - dt)
            if dt < opts.dedup_radius * _TWO_PI and abs(x[1] - y[1]) < opts.dedup_radius * max(1.0, y[1]):
                duplicate = True
                break
        if not duplicate:
            kept.append((x, rnorm))

    orbits = []
    for x, rnorm in kept:
        end, inter = successor_iterate(alpha, F, SectionPoint(float(x[0]), float(x[1])), n, tol=TIGHT_TOL)
        orbits.append(
            PeriodicOrbit(
                m=m,
                n=n,
                section_point=inter[0],
                impact_times=tuple(p.t for p in inter),
                impact_speeds=tuple(p.v for p in inter),
                residual=rnorm,
            )
        )
    orbits.sort(key=lambda o: (o.t0 % _TWO_PI, o.v0))
    return _tag_orbit_classes(orbits)


def _tag_orbit_classes(orbits: list[PeriodicOrbit], tol: float = 1e-5) -> list[PeriodicOrbit]:
    """Group fixed points that lie on a common bouncing trajectory.

    Two fixed points of S^n describe the same solution when one occurs among
    the other's intermediate impacts, up to a whole number of forcing periods.
    """
    classes: list[int] = []
    reps: list[PeriodicOrbit] = []
    out = []
    for orb in orbits:
        assigned = None
        for cls, rep in zip(classes, reps):
            for t_i, v_i in zip(rep.impact_times, rep.impact_speeds):
                dt = abs((orb.t0 - t_i) % _TWO_PI)
                dt = min(dt, _TWO_PI - dt)
                if dt < tol and abs(orb.v0 - v_i) < tol * max(1.0, v_i):
                    assigned = cls
                    break
            if assigned is not None:
                break
        if assigned is None:
            assigned = (max(classes) + 1) if classes else 0
            classes.append(assigned)
            reps.append(orb)
        out.append(
            PeriodicOrbit(
                m=orb.m,
                n=orb.n,
                section_point=orb.section_point,
                impact_times=orb.impact_times,
                impact_speeds=orb.impact_speeds,
                residual=orb.residual,
                orbit_class=assigned,
            )
        )
    return out


def minimal_m(
    alpha: float,
    F: Forcing,
    n: int,
    t0_samples: int = 8,
    max_doublings: int = 60,
) -> int:
    """Smallest m whose rotation window brackets the n-impact advance.

    The advance of S^n at the ladder floor bounds the rotation from below;
    m is the least integer with 2*m*pi above it.  The unbounded growth of the
    advance in v0 guarantees the outer twist boundary exists; it is confirmed
    by doubling the probe speed until the advance exceeds 2*m*pi everywhere.
    """
    ladder = gamma_ladder(alpha, F.p1, F.p2, n)
    v_probe = ladder.top * (1.0 + 1e-3) if ladder.top > 0 else 1e-3
    t0s = np.linspace(0.0, _TWO_PI, t0_samples, endpoint=False)

    def advance(v):
        vals = []
        for t0 in t0s:
            end, _ = successor_iterate(alpha, F, SectionPoint(float(t0), float(v)), n, tol=SCAN_TOL)
            vals.append(end.t - t0)
        return np.array(vals)

    adv_floor = advance(v_probe)
    m = int(math.floor(float(np.max(adv_floor)) / _TWO_PI)) + 1

    v = max(2.0 * v_probe, 1.0)
    for _ in range(max_doublings):
        if float(np.min(advance(v))) > _TWO_PI * m:
            return m
        v *= 2.0
    raise NumericalError(f"twist boundary not found below v={v} for n={n}")  # pragma: no cover


@dataclass(frozen=True)
class VerificationReport:
    orbit: PeriodicOrbit
    impact_count: int
    periodicity_sup: float
    reflection_defect: float
    passed: bool
    failures: tuple[str, ...] = field(default_factory=tuple)


def verify_orbit(
    alpha: float,
    F: Forcing,
    orbit: PeriodicOrbit,
    n_samples: int = 64,
    sup_tol: float = 1e-6,
    count_window_pad: float = 1e-6,
) -> VerificationReport:
    """Reintegrate the orbit over two periods and check its defining properties.

    Checks: exactly n impacts in [t0, t0 + 2*m*pi), elastic reflection at every
    recorded collision, and periodicity of the (u, v) samples under the time
    shift 2*m*pi in sup norm.
    """
    period = _TWO_PI * orbit.m
    t0 = orbit.t0
    traj = continue_bouncing(alpha, F, t0, orbit.v0, t0 + 2.0 * period + 0.5)

    # Impacts in one period: the launch plus interior hits strictly inside.
    hits = [t for t in traj.collision_times if t < t0 + period - count_window_pad]
    impact_count = 1 + len(hits)

    reflection = 0.0
    for c in traj.collisions:
        reflection = max(reflection, abs(c.v_out + c.v_in) / max(abs(c.v_in), 1e-300))

    # The velocity flips sign at each collision, so periodicity of (u, v) is
    # only meaningful away from the impact instants; skip samples within a
    # small window of any recorded collision (in either period copy).
    impact_like = [t0] + traj.collision_times
    ts = t0 + (np.arange(n_samples) + 0.5) * (period / n_samples)
    window = 1e-3
    sup = 0.0
    for t in ts:
        near = min(
            min(abs(t - s) for s in impact_like),
            min(abs(t + period - s) for s in impact_like),
        )
        if near < window:
            continue
        u1, v1 = traj.eval(float(t))
        u2, v2 = traj.eval(float(t) + period)
        sup = max(sup, abs(u1 - u2), abs(v1 - v2))

    failures = []
    if impact_count != orbit.n:
        failures.append(f"impact count {impact_count} != n={orbit.n}")
    if sup >= sup_tol:
        failures.append(f"periodicity sup-norm {sup:.3e} >= {sup_tol}")
    if reflection >= 1e-10:
        failures.append(f"reflection defect {reflection:.3e} >= 1e-10")
    return VerificationReport(
        orbit=orbit,
        impact_count=impact_count,
        periodicity_sup=float(sup),
        reflection_defect=float(reflection),
        passed=not failures,
        failures=tuple(failures),
    )
