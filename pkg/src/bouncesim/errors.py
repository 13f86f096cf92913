"""Exception types shared across the package."""


class BounceSimError(Exception):
    """Base class for all package errors."""


class DomainError(BounceSimError, ValueError):
    """Argument outside the mathematical domain (e.g. u <= 0 at the singularity)."""


class BoundsError(BounceSimError, ValueError):
    """Invalid forcing bounds (p1 >= 0 or p2 > p1)."""


class RegimeError(BounceSimError, ValueError):
    """Energy in the wrong regime for the requested branch."""


class BelowCenterError(RegimeError):
    """Energy at or below the center energy; no orbit exists."""


class GuardError(BounceSimError, ValueError):
    """Launch speed at or below the collision-certification threshold."""


class NumericalError(BounceSimError, RuntimeError):
    """Solver or quadrature failure. Carries the last known state when available."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class QuadratureError(NumericalError):
    """Quadrature did not converge to the requested tolerance."""


class NoCollisionError(BounceSimError, RuntimeError):
    """Velocity vanished before reaching the singularity; no collision on this arc.

    ``state`` holds (t, u, v) at the abort point so the caller can resume
    classical integration.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class IterateUndefinedError(BounceSimError, RuntimeError):
    """An intermediate successor iterate violated the speed guard.

    ``index`` is the 0-based iterate at which the guard failed.
    """

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class AccuracyError(BounceSimError, ValueError):
    """Finite-difference step too large for the requested estimate."""
