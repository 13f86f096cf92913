"""2*pi-periodic trigonometric-polynomial forcing with certified sign bounds.

The collision machinery needs certified constants p2 <= p(t) <= p1 < 0.  For
a trigonometric polynomial these are obtained from a dense sample, sharpened
by local optimization and then widened by the second-derivative bound
|p''| <= sum(k^2 * sqrt(a_k^2 + b_k^2)), which covers anything the sample
grid could have missed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BoundsError

__all__ = ["Forcing"]

_N_SAMPLES = 4096


def _certify_bounds(c0: float, harmonics) -> tuple[float, float]:
    if not harmonics:
        return c0, c0
    t = np.linspace(0.0, 2.0 * np.pi, _N_SAMPLES, endpoint=False)
    p = np.full_like(t, c0)
    m2 = 0.0  # bound on |p''|
    for k, a, b in harmonics:
        p += a * np.cos(k * t) + b * np.sin(k * t)
        m2 += k * k * math.hypot(a, b)

    def eval_scalar(x):
        return c0 + sum(a * math.cos(k * x) + b * math.sin(k * x) for k, a, b in harmonics)

    dt = t[1] - t[0]
    i_max = int(np.argmax(p))
    i_min = int(np.argmin(p))
    res_max = minimize_scalar(
        lambda x: -eval_scalar(x), bracket=None,
        bounds=(t[i_max] - dt, t[i_max] + dt), method="bounded",
        options={"xatol": 1e-12},
    )
    res_min = minimize_scalar(
        eval_scalar, bounds=(t[i_min] - dt, t[i_min] + dt), method="bounded",
        options={"xatol": 1e-12},
    )
    pad = m2 * dt * dt / 8.0
    p1 = max(float(-res_max.fun), float(np.max(p))) + pad
    p2 = min(float(res_min.fun), float(np.min(p))) - pad
    return p1, p2


@dataclass(frozen=True)
class Forcing:
    """p(t) = c0 + sum(a_k cos(kt) + b_k sin(kt)) with certified p2 <= p <= p1 < 0."""

    c0: float
    harmonics: tuple[tuple[int, float, float], ...] = ()
    p1: float = field(init=False)
    p2: float = field(init=False)

    def __post_init__(self):
        harm = tuple(
            (int(k), float(a), float(b)) for k, a, b in self.harmonics if a != 0.0 or b != 0.0
        )
        if any(k < 1 for k, _, _ in harm):
            raise BoundsError("harmonic indices must be >= 1")
        object.__setattr__(self, "harmonics", harm)
        p1, p2 = _certify_bounds(self.c0, harm)
        if p1 >= 0.0:
            raise BoundsError(f"forcing must be negative everywhere; certified max is {p1}")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)

    @classmethod
    def constant(cls, p0: float) -> "Forcing":
        return cls(c0=p0)

    @classmethod
    def cosine(cls, c0: float, amplitude: float, k: int = 1) -> "Forcing":
        """Convenience for c0 + amplitude*cos(k t)."""
        return cls(c0=c0, harmonics=((k, amplitude, 0.0),))

    @property
    def is_constant(self) -> bool:
        return not self.harmonics

    def __call__(self, t):
        """Evaluate p(t); works on scalars and arrays."""
        p = self.c0
        if isinstance(t, np.ndarray):
            p = np.full_like(t, self.c0, dtype=float)
        for k, a, b in self.harmonics:
            p = p + a * np.cos(k * t) + b * np.sin(k * t)
        return p

    def to_dict(self) -> dict:
        return {
            "c0": self.c0,
            "harmonics": [{"k": k, "a": a, "b": b} for k, a, b in self.harmonics],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Forcing":
        harmonics = tuple(
            (int(h["k"]), float(h.get("a", 0.0)), float(h.get("b", 0.0)))
            for h in data.get("harmonics", [])
        )
        return cls(c0=float(data["c0"]), harmonics=harmonics)
