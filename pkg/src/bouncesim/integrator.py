"""Integration of the forced singular oscillator through elastic collisions.

Away from the singularity the first-order system

    u' = v,   v' = u**(-alpha) + p(t)

is smooth and handled by an adaptive Runge-Kutta integrator with event
localization at the handoff radius ``delta``.  Inside [0, delta] the motion
is re-parametrized by position: with the energy-like variable
w = v**2/2 + W(u), W(u) = -u**(1-alpha)/(1-alpha), the crossing obeys

    dt/du = sigma / sqrt(2*(w - W(u))),   dw/du = p(t),

whose right-hand side stays bounded through u = 0 as long as w > 0, so the
collision time and (finite) collision speed are well defined.  Reflecting the
velocity sign at u = 0 preserves w exactly, which is the elastic-collision
rule.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import DomainError, GuardError, NoCollisionError, NumericalError
from .forcing import Forcing
from .potential import gamma_threshold

__all__ = [
    "CollisionEvent",
    "ClassicalArc",
    "CrossingLeg",
    "BounceTrajectory",
    "default_delta",
    "singular_part",
    "integrate_classical",
    "cross_collision",
    "CrossingResult",
    "continue_bouncing",
    "sandwich_check",
    "SandwichReport",
]

_RTOL_CLASSICAL = 1e-10
_ATOL_CLASSICAL = 1e-12
_RTOL_CROSSING = 1e-12
_ATOL_CROSSING = 1e-14
_W_MIN = 1e-12


def singular_part(alpha: float, u):
    """W(u) = -u**(1-alpha)/(1-alpha), the potential of the repulsive term alone."""
    q = 1.0 - alpha
    return -(u**q) / q


def default_delta(alpha: float, p1: float) -> float:
    """Handoff radius: 1/100 of the smaller of the center and outer-zero abscissae
    of the mildest constant forcing, keeping the classical stepper away from the
    stiff neighborhood of the singularity."""
    u_c = (-p1) ** (-1.0 / alpha)
    eta = ((alpha - 1.0) * p1) ** (-1.0 / alpha)
    return min(u_c, eta) / 100.0


@dataclass(frozen=True)
class CollisionEvent:
    t_hit: float
    v_in: float
    v_out: float

    @property
    def energy(self) -> float:
        return 0.5 * self.v_in * self.v_in


@dataclass(frozen=True)
class ClassicalArc:
    """Smooth piece with u > delta, backed by a dense ODE solution."""

    t_lo: float
    t_hi: float
    sol: object  # scipy OdeSolution over the original (possibly reversed) span

    def eval(self, t: float) -> tuple[float, float]:
        u, v = self.sol(t)
        return float(u), float(v)


@dataclass(frozen=True)
class CrossingLeg:
    """Regularized piece inside [0, delta], parametrized by position.

    ``sol`` maps u to (t, w); ``sigma`` is the velocity sign on the leg and
    ``forward`` records whether time increases with integration progress.
    """

    alpha: float
    u_lo: float
    u_hi: float
    t_lo: float
    t_hi: float
    sigma: float
    sol: object

    def state_at_u(self, u: float) -> tuple[float, float, float]:
        t, w = self.sol(u)
        v = self.sigma * math.sqrt(max(2.0 * (w - singular_part(self.alpha, u)) if u > 0 else 2.0 * w, 0.0))
        return float(t), float(w), v

    def eval(self, t: float) -> tuple[float, float]:
        """Invert the monotone time map t(u) on the leg."""
        a, b = self.u_lo, self.u_hi

        def g(u):
            return float(self.sol(u)[0]) - t

        ga, gb = g(a), g(b)
        if ga == 0.0:
            u = a
        elif gb == 0.0:
            u = b
        elif ga * gb > 0.0:
            # query at the boundary within roundoff
            u = a if abs(ga) < abs(gb) else b
        else:
            u = brentq(g, a, b, xtol=1e-15, rtol=8.9e-16)
        _, _, v = self.state_at_u(u)
        return u, v


@dataclass
class BounceTrajectory:
    """Time-ordered classical arcs and crossing legs with the collision log."""

    alpha: float
    t_start: float
    t_end: float
    segments: list = field(default_factory=list)
    collisions: list[CollisionEvent] = field(default_factory=list)
    status: str = "completed"  # completed | regime_change
    regime_change_time: float | None = None
    uncertified_rebounds: int = 0

    def eval(self, t: float) -> tuple[float, float]:
        """State (u, v) at time t inside the covered span."""
        lo = min(self.t_start, self.t_end)
        hi = max(self.t_start, self.t_end)
        if not lo <= t <= hi:
            raise DomainError(f"t={t} outside trajectory span [{lo}, {hi}]")
        starts = [s.t_lo for s in self.segments]
        i = max(bisect_right(starts, t) - 1, 0)
        # collision instants sit between legs; both neighbors agree there
        seg = self.segments[i]
        return seg.eval(min(max(t, seg.t_lo), seg.t_hi))

    def sample(self, ts) -> np.ndarray:
        out = np.empty((len(ts), 2))
        for j, t in enumerate(ts):
            out[j] = self.eval(float(t))
        return out

    @property
    def collision_times(self) -> list[float]:
        return [c.t_hit for c in self.collisions]


def _classical_rhs(alpha: float, F: Forcing):
    neg_alpha = -alpha

    def rhs(t, y):
        u, v = y
        if u < 1e-14:
            u = 1e-14  # trial steps may overshoot past the handoff event
        return (v, u**neg_alpha + F(t))

    return rhs


def integrate_classical(
    alpha: float,
    F: Forcing,
    t0: float,
    u0: float,
    v0: float,
    t_max: float,
    delta: float | None = None,
    rtol: float = _RTOL_CLASSICAL,
    atol: float = _ATOL_CLASSICAL,
    dense: bool = True,
):
    """Integrate the smooth system until u falls through delta or t_max is hit.

    Returns (arc, exit_reason, state) with exit_reason "approaching-collision"
    or "timeout" and state = (t, u, v) at the exit point.  Works for backward
    spans (t_max < t0) as well.  Starting below delta is allowed when the
    motion points outward (e.g. resuming after a stalled crossing); the event
    only fires on inward crossings of the handoff radius.
    """
    if u0 <= 0.0:
        raise DomainError(f"classical integration needs u0 > 0, got {u0}")
    if delta is None:
        delta = default_delta(alpha, F.p1)

    def hit_delta(t, y):
        return y[0] - delta

    hit_delta.terminal = True
    hit_delta.direction = -1

    res = solve_ivp(
        _classical_rhs(alpha, F),
        (t0, t_max),
        (u0, v0),
        method="DOP853",
        events=(hit_delta,),
        rtol=rtol,
        atol=atol,
        dense_output=dense,
    )
    if res.status == -1:
        raise NumericalError(
            f"classical integration failed: {res.message}",
            state=(float(res.t[-1]), float(res.y[0, -1]), float(res.y[1, -1])),
        )
    if res.status == 1:
        t_ev = float(res.t_events[0][0])
        u_ev, v_ev = (float(x) for x in res.y_events[0][0])
        exit_reason = "approaching-collision"
        state = (t_ev, u_ev, v_ev)
    else:
        exit_reason = "timeout"
        state = (float(res.t[-1]), float(res.y[0, -1]), float(res.y[1, -1]))
    arc = None
    if dense:
        arc = ClassicalArc(t_lo=min(t0, state[0]), t_hi=max(t0, state[0]), sol=res.sol)
    return arc, exit_reason, state


def _cross(
    alpha: float,
    F: Forcing,
    u_from: float,
    u_to: float,
    t_start: float,
    w_start: float,
    sigma: float,
    rtol: float = _RTOL_CROSSING,
    atol: float = _ATOL_CROSSING,
    w_min: float = _W_MIN,
):
    """Integrate (t, w) over u between u_from and u_to; returns a CrossingLeg.

    Raises NoCollisionError if the kinetic term w - W(u) falls to w_min before
    the target is reached (the velocity is about to vanish).
    """

    # Trial steps may overshoot the span or the stall event; keep the RHS
    # finite there so the error estimator can reject and shrink the step.
    w_floor = 0.25 * w_min

    def rhs(u, y):
        t, w = y
        kin = w - singular_part(alpha, u) if u > 0.0 else w
        v_abs = math.sqrt(2.0 * max(kin, w_floor))
        return (sigma / v_abs, F(t))

    def stall(u, y):
        wu = y[1] - (singular_part(alpha, u) if u > 0.0 else 0.0)
        return wu - w_min

    stall.terminal = True
    stall.direction = -1

    res = solve_ivp(
        rhs,
        (u_from, u_to),
        (t_start, w_start),
        method="DOP853",
        events=(stall,),
        rtol=rtol,
        atol=atol,
        dense_output=True,
    )
    if res.status == -1:
        raise NumericalError(f"collision crossing failed: {res.message}")
    if res.status == 1:
        u_s = float(res.t_events[0][0])
        t_s, w_s = (float(x) for x in res.y_events[0][0])
        raise NoCollisionError(
            f"velocity vanished at u={u_s} before reaching u={u_to}",
            state=(t_s, u_s, sigma * math.sqrt(max(2.0 * (w_s - singular_part(alpha, u_s)), 0.0))),
        )
    t_end, w_end = float(res.y[0, -1]), float(res.y[1, -1])
    leg = CrossingLeg(
        alpha=alpha,
        u_lo=min(u_from, u_to),
        u_hi=max(u_from, u_to),
        t_lo=min(t_start, t_end),
        t_hi=max(t_start, t_end),
        sigma=sigma,
        sol=res.sol,
    )
    return t_end, w_end, leg


@dataclass(frozen=True)
class CrossingResult:
    t: float
    u: float
    v: float
    w: float
    leg: CrossingLeg


def cross_collision(
    alpha: float,
    F: Forcing,
    t_start: float,
    w_start: float,
    direction: str,
    delta: float,
    rtol: float = _RTOL_CROSSING,
    atol: float = _ATOL_CROSSING,
) -> CrossingResult:
    """Carry the state across [0, delta] in the position-energy variables.

    direction="incoming": start at u=delta with energy w_start, return the
    collision time and velocity -sqrt(2*w(0)).  direction="outgoing": start at
    the collision (u=0, w_start > 0), return the state at u=delta.
    """
    if direction == "incoming":
        t_hit, w_hit, leg = _cross(alpha, F, delta, 0.0, t_start, w_start, sigma=-1.0, rtol=rtol, atol=atol)
        v_in = -math.sqrt(2.0 * w_hit)
        return CrossingResult(t=t_hit, u=0.0, v=v_in, w=w_hit, leg=leg)
    if direction == "outgoing":
        if w_start <= 0.0:
            raise DomainError(f"outgoing crossing needs positive collision energy, got {w_start}")
        t_d, w_d, leg = _cross(alpha, F, 0.0, delta, t_start, w_start, sigma=1.0, rtol=rtol, atol=atol)
        v_d = math.sqrt(max(2.0 * (w_d - singular_part(alpha, delta)), 0.0))
        return CrossingResult(t=t_d, u=delta, v=v_d, w=w_d, leg=leg)
    raise ValueError(f"direction must be 'incoming' or 'outgoing', got {direction!r}")


def continue_bouncing(
    alpha: float,
    F: Forcing,
    t0: float,
    v0: float,
    t_end: float,
    delta: float | None = None,
    require_guard: bool = True,
    u0: float | None = None,
    rtol: float = _RTOL_CLASSICAL,
    atol: float = _ATOL_CLASSICAL,
) -> BounceTrajectory:
    """Continue the bouncing solution launched at (u=0, v0 > 0) up to t_end.

    Alternates outgoing crossing, classical arc and incoming crossing with an
    elastic reflection at every collision.  If an arc turns around inside the
    handoff region the trajectory continues classically and the regime change
    is recorded; it is a status, not an error.  Passing ``u0`` starts from
    classical initial data (u0, v0) instead of a collision, with no speed
    guard.
    """
    _, gamma = gamma_threshold(alpha, F.p1, F.p2)
    if delta is None:
        delta = default_delta(alpha, F.p1)

    traj = BounceTrajectory(alpha=alpha, t_start=t0, t_end=t_end)
    t = t0
    if u0 is None:
        if v0 <= 0.0:
            raise DomainError(f"launch speed must be positive, got {v0}")
        if require_guard and v0 <= gamma:
            raise GuardError(f"launch speed {v0} not above the certification threshold {gamma}")
        at_collision = True
        state = None  # (t, u, v) when not at a collision
    else:
        at_collision = False
        state = (t0, u0, v0)
    w = 0.5 * v0 * v0

    while t < t_end:
        if at_collision:
            out = cross_collision(alpha, F, t, w, "outgoing", delta)
            traj.segments.append(out.leg)
            t, u, v = out.t, out.u, out.v
        else:
            t, u, v = state

        arc, exit_reason, exit_state = integrate_classical(
            alpha, F, t, u, v, t_end, delta=delta, rtol=rtol, atol=atol, dense=True
        )
        if arc is not None:
            traj.segments.append(arc)
        t, u, v = exit_state
        if exit_reason == "timeout":
            break

        w_in = 0.5 * v * v + singular_part(alpha, u)
        try:
            hit = cross_collision(alpha, F, t, w_in, "incoming", delta)
        except NoCollisionError as stallinfo:
            if traj.status == "completed":
                traj.status = "regime_change"
                traj.regime_change_time = stallinfo.state[0]
            state = stallinfo.state
            at_collision = False
            t = state[0]
            continue
        traj.segments.append(hit.leg)
        t = hit.t
        v_in = hit.v
        v_out = -v_in
        traj.collisions.append(CollisionEvent(t_hit=t, v_in=v_in, v_out=v_out))
        if v_out <= gamma:
            traj.uncertified_rebounds += 1
        w = hit.w
        at_collision = True

    coverage = max((s.t_hi for s in traj.segments), default=t0)
    traj.t_end = min(t_end, coverage)
    return traj


def _first_collision(alpha, F, t_from, u_from, v_from, sense, delta, rtol=_RTOL_CLASSICAL, atol=_ATOL_CLASSICAL):
    """First collision of the classical solution through (t_from, u_from, v_from).

    sense=+1 searches forward in time, sense=-1 backward.  Returns
    (t_hit, v_hit, pieces) where pieces are the dense segments covering
    [t_from, t_hit] (or [t_hit, t_from] backward).
    """
    horizon = t_from + sense * 1e4
    arc, exit_reason, state = integrate_classical(
        alpha, F, t_from, u_from, v_from, horizon, delta=delta, rtol=rtol, atol=atol
    )
    if exit_reason != "approaching-collision":
        raise NumericalError(f"no collision found within horizon {horizon}")
    t_d, u_d, v_d = state
    w = 0.5 * v_d * v_d + singular_part(alpha, u_d)
    if sense > 0:
        t_hit, w_hit, leg = _cross(alpha, F, u_d, 0.0, t_d, w, sigma=-1.0)
        v_hit = -math.sqrt(2.0 * w_hit)
    else:
        t_hit, w_hit, leg = _cross(alpha, F, u_d, 0.0, t_d, w, sigma=+1.0)
        v_hit = +math.sqrt(2.0 * w_hit)
    pieces = [p for p in (arc, leg) if p is not None]
    return t_hit, v_hit, pieces


def _eval_pieces(pieces, t):
    for p in pieces:
        if p.t_lo - 1e-12 <= t <= p.t_hi + 1e-12:
            return p.eval(min(max(t, p.t_lo), p.t_hi))
    raise DomainError(f"t={t} outside the integrated span")


@dataclass(frozen=True)
class SandwichReport:
    """Pointwise confinement and collision-time interleaving diagnostics."""

    t_hits_forward: tuple[float, float, float]  # (t1 actual, t12 lower-forcing, t11 upper-forcing)
    t_hits_backward: tuple[float, float, float]  # (t0, t02, t01)
    speeds_forward: tuple[float, float, float]  # |v| at the forward collision
    max_violation_low: float  # max of u2 - u over the sample grid
    max_violation_high: float  # max of u - u1
    interleaving_ok: bool
    confinement_ok: bool
    slack: float


def sandwich_check(
    alpha: float,
    F: Forcing,
    u0: float,
    t_start: float = 0.0,
    n_samples: int = 400,
    slack: float = 1e-8,
    delta: float | None = None,
) -> SandwichReport:
    """Compare the forced solution from (u0, 0) with the constant-forcing envelopes.

    The solutions of the constant systems at the certified bounds p1 (milder)
    and p2 (stronger) confine the forced solution, u2 <= u <= u1, and their
    collision times bracket its own on both sides of t_start.
    """
    eta, _ = gamma_threshold(alpha, F.p1, F.p2)
    if not u0 > eta:
        raise DomainError(f"sandwich needs u0 > eta = {eta}, got {u0}")
    if delta is None:
        delta = default_delta(alpha, F.p1)

    systems = (F, Forcing.constant(F.p1), Forcing.constant(F.p2))
    fwd, bwd = [], []
    for G in systems:
        fwd.append(_first_collision(alpha, G, t_start, u0, 0.0, +1, delta))
        bwd.append(_first_collision(alpha, G, t_start, u0, 0.0, -1, delta))

    (t1, v1, pc_f), (t11, v11, p1_f), (t12, v12, p2_f) = fwd
    (t0, _, pc_b), (t01, _, p1_b), (t02, _, p2_b) = bwd

    inter_fwd = (t12 <= t1 + slack) and (t1 <= t11 + slack)
    inter_bwd = (t01 <= t0 + slack) and (t0 <= t02 + slack)

    # Pointwise confinement on the common forward and backward spans.
    viol_low = -np.inf
    viol_high = -np.inf
    for sign, tc_lim, pieces_all in (
        (+1, min(t1, t11, t12), (pc_f, p1_f, p2_f)),
        (-1, max(t0, t01, t02), (pc_b, p1_b, p2_b)),
    ):
        ts = np.linspace(t_start, tc_lim, n_samples, endpoint=False)
        for t in ts:
            u, _ = _eval_pieces(pieces_all[0], float(t))
            u_hi, _ = _eval_pieces(pieces_all[1], float(t))
            u_lo, _ = _eval_pieces(pieces_all[2], float(t))
            viol_low = max(viol_low, u_lo - u)
            viol_high = max(viol_high, u - u_hi)

    return SandwichReport(
        t_hits_forward=(t1, t12, t11),
        t_hits_backward=(t0, t02, t01),
        speeds_forward=(abs(v1), abs(v12), abs(v11)),
        max_violation_low=float(viol_low),
        max_violation_high=float(viol_high),
        interleaving_ok=bool(inter_fwd and inter_bwd),
        confinement_ok=bool(viol_low <= slack and viol_high <= slack),
        slack=slack,
    )
