"""Autonomous power-law potential of the repulsive weak-singularity oscillator.

For exponent ``0 < alpha < 1`` and a constant negative forcing level ``p0``,
the oscillator  u'' - u**(-alpha) = p0  derives from the potential

    V(u) = -p0*u - u**(1-alpha)/(1-alpha),   u > 0,

which has V(0) = 0, V'(u) -> -inf as u -> 0+, a nondegenerate minimum at
u_center = (-p0)**(-1/alpha) and a second zero at u_zero > u_center.  Closed
orbits live on energies V(u_center) < h < 0; energies h >= 0 reach the
singularity u = 0 with finite speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np
from scipy.optimize import brentq

from .errors import BelowCenterError, BoundsError, DomainError, NumericalError

__all__ = [
    "PowerLawPotential",
    "GeneralPotential",
    "eval_derivatives",
    "turning_points",
    "schaaf_expression",
    "schaaf_expression_closed_form",
    "schaaf_integrands",
    "gamma_threshold",
    "energy_gap_from",
]


@runtime_checkable
class GeneralPotential(Protocol):
    """Evaluation surface for a potential with a singular left endpoint.

    Implementations expose the potential and its first four derivatives on an
    open interval whose left endpoint is the singularity, the abscissa of that
    endpoint, and the critical (collision) energy reached there.  Only
    :class:`PowerLawPotential` ships concrete; the protocol fixes the surface
    an alternative potential would have to provide.
    """

    singular_abscissa: float
    critical_energy: float

    def value(self, u: float) -> float: ...

    def dV(self, u: float) -> float: ...

    def d2V(self, u: float) -> float: ...

    def d3V(self, u: float) -> float: ...

    def d4V(self, u: float) -> float: ...


@dataclass(frozen=True)
class PowerLawPotential:
    """V(u) = -p0*u - u**(1-alpha)/(1-alpha) with 0 < alpha < 1 and p0 < 0."""

    alpha: float
    p0: float

    # Singularity sits at u = 0 and carries the collision energy h = 0.
    singular_abscissa: float = 0.0
    critical_energy: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.p0 < 0.0:
            raise DomainError(f"p0 must be negative, got {self.p0}")

    @property
    def u_center(self) -> float:
        """Abscissa of the center, where V' vanishes."""
        return (-self.p0) ** (-1.0 / self.alpha)

    @property
    def u_zero(self) -> float:
        """Outer zero of V; outer edge of the closed-orbit band."""
        return ((self.alpha - 1.0) * self.p0) ** (-1.0 / self.alpha)

    @property
    def h_center(self) -> float:
        """Energy at the center, the infimum of admissible energies."""
        return self.value(self.u_center)

    def value(self, u):
        """Potential value; accepts scalars or numpy arrays of positive u."""
        if np.any(np.asarray(u) <= 0.0):
            raise DomainError(f"potential is singular at u <= 0, got u={u}")
        return -self.p0 * u - u ** (1.0 - self.alpha) / (1.0 - self.alpha)

    def dV(self, u):
        return -self.p0 - u ** (-self.alpha)

    def d2V(self, u):
        return self.alpha * u ** (-self.alpha - 1.0)

    def d3V(self, u):
        return -self.alpha * (self.alpha + 1.0) * u ** (-self.alpha - 2.0)

    def d4V(self, u):
        a = self.alpha
        return a * (a + 1.0) * (a + 2.0) * u ** (-a - 3.0)


def eval_derivatives(P: PowerLawPotential, u: float) -> tuple[float, float, float, float, float]:
    """Return (V, V', V'', V''', V'''') at u > 0."""
    if not u > 0.0:
        raise DomainError(f"potential is singular at u <= 0, got u={u}")
    return (P.value(u), P.dV(u), P.d2V(u), P.d3V(u), P.d4V(u))


def energy_gap_from(P: PowerLawPotential, u0: float, d) -> float:
    """V(u0) - V(u0 + d), evaluated without cancellation for small |d|.

    When u0 is a turning point of the energy level h (V(u0) = h), this equals
    h - V(u0 + d) up to the root residual, and vanishes exactly at d = 0.
    Valid for any d with u0 + d > 0.
    """
    q = 1.0 - P.alpha
    return P.p0 * d + u0**q * np.expm1(q * np.log1p(d / u0)) / q


def _turning_points_half(P: PowerLawPotential, h: float):
    # alpha = 1/2: V(u) = -p0*u - 2*sqrt(u) is quadratic in s = sqrt(u).
    q = -P.p0
    disc = 1.0 + q * h
    if disc < 0.0:
        raise BelowCenterError(f"h={h} below center energy {P.h_center}")
    root = math.sqrt(disc)
    s_minus = (1.0 - root) / q
    s_plus = (1.0 + root) / q
    u_plus = s_plus * s_plus
    u_minus = s_minus * s_minus if s_minus > 0.0 else None
    return u_minus, u_plus


def _bracketed_root(f, a: float, b: float) -> float:
    try:
        return brentq(f, a, b, xtol=1e-300, rtol=8.9e-16, maxiter=200)
    except Exception as exc:  # pragma: no cover - defensive
        raise NumericalError(f"turning-point solve failed on [{a}, {b}]: {exc}") from exc


def turning_points(P: PowerLawPotential, h: float) -> tuple[float | None, float]:
    """Solve V(u) = h around the center.

    For h_center < h < 0 returns both roots (u_minus, u_plus) with
    0 < u_minus < u_center < u_plus < u_zero.  For h >= 0 the inner root
    disappears into the collision side and (None, u_plus) is returned with
    u_plus >= u_zero.  The degenerate h = h_center yields (u_center, u_center).
    """
    hc = P.h_center
    if h < hc:
        raise BelowCenterError(f"h={h} below center energy {hc}")
    if h == hc:
        uc = P.u_center
        return uc, uc

    if P.alpha == 0.5:
        return _turning_points_half(P, h)

    uc = P.u_center
    f = lambda u: P.value(u) - h

    # Outer root: V is increasing on (uc, inf); expand the bracket until sign.
    hi = max(2.0 * P.u_zero, uc * 2.0)
    while f(hi) < 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise NumericalError("outer turning point bracket expansion failed")
    u_plus = _bracketed_root(f, uc, hi)
    u_plus = _newton_polish(P, h, u_plus)

    if h >= 0.0:
        return None, u_plus

    # Inner root: V decreasing on (0, uc), V -> 0 at 0+ so f(0+) = -h > 0.
    lo = uc
    while f(lo) > 0.0:  # pragma: no cover - f(uc) < 0 by construction
        lo *= 0.5
    a = min(1e-280, uc * 1e-12)
    u_minus = _bracketed_root(f, a, uc)
    u_minus = _newton_polish(P, h, u_minus)
    return u_minus, u_plus


def _newton_polish(P: PowerLawPotential, h: float, u: float, steps: int = 2) -> float:
    for _ in range(steps):
        dv = P.dV(u)
        if dv == 0.0:
            break
        step = (P.value(u) - h) / dv
        u_new = u - step
        if u_new <= 0.0:
            break
        u = u_new
    return u


def schaaf_expression(P: PowerLawPotential, u: float) -> float:
    """5*(V''')**2 - 3*V''*V'''' from the derivative values at u."""
    if not u > 0.0:
        raise DomainError(f"potential is singular at u <= 0, got u={u}")
    return 5.0 * P.d3V(u) ** 2 - 3.0 * P.d2V(u) * P.d4V(u)


def schaaf_expression_closed_form(P: PowerLawPotential, u) -> float:
    """Closed form alpha**2*(alpha+1)*(2*alpha-1)*u**(-2*(alpha+2)).

    Positive for alpha > 1/2, zero at alpha = 1/2, negative below: the sign
    decides whether the period grows or shrinks with energy on the closed
    orbits.
    """
    a = P.alpha
    return a * a * (a + 1.0) * (2.0 * a - 1.0) * u ** (-2.0 * (a + 2.0))


def schaaf_integrands(P: PowerLawPotential, u: float) -> tuple[float, float]:
    """Monotonicity-criterion factors (phi, psi) at u.

    phi = ((V')**2 - 2*V*V'') / (V')**3 and psi = 1 - 2*V*V''/(V')**2.
    Both are singular where V' = 0 (the center).
    """
    if not u > 0.0:
        raise DomainError(f"potential is singular at u <= 0, got u={u}")
    v, dv, d2v, _, _ = eval_derivatives(P, u)
    if dv == 0.0:
        raise DomainError(f"criterion integrands are singular at the center u={u}")
    phi = (dv * dv - 2.0 * v * d2v) / dv**3
    psi = 1.0 - 2.0 * v * d2v / (dv * dv)
    return phi, psi


def gamma_threshold(alpha: float, p1: float, p2: float) -> tuple[float, float]:
    """Collision-certification constants (eta, gamma) for bounds p2 <= p(t) <= p1 < 0.

    eta = ((alpha-1)*p1)**(-1/alpha) is the outer zero of the potential at the
    mildest forcing level; gamma = sqrt(2*(p1-p2)*eta) is the launch speed
    above which the next collision is guaranteed.  gamma = 0 iff p1 = p2.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if p1 >= 0.0 or p2 > p1:
        raise BoundsError(f"need p2 <= p1 < 0, got p1={p1}, p2={p2}")
    eta = ((alpha - 1.0) * p1) ** (-1.0 / alpha)
    gamma = math.sqrt(2.0 * (p1 - p2) * eta)
    return eta, gamma
