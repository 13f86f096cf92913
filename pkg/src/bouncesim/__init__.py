"""Bouncing solutions of the repulsive weak-singularity oscillator.

Toolkit for the forced equation u'' - u**(-alpha) = p(t) with 0 < alpha < 1
and negative periodic forcing: extended period function of the autonomous
system, collision-regularized integration, the successor map on the collision
section, and the search for periodic bouncing orbits.
"""

from .errors import (
    AccuracyError,
    BelowCenterError,
    BoundsError,
    BounceSimError,
    DomainError,
    GuardError,
    IterateUndefinedError,
    NoCollisionError,
    NumericalError,
    QuadratureError,
    RegimeError,
)
from .finder import (
    FinderOptions,
    PeriodicOrbit,
    VerificationReport,
    find_orbits,
    minimal_m,
    verify_orbit,
)
from .forcing import Forcing
from .integrator import (
    BounceTrajectory,
    ClassicalArc,
    CollisionEvent,
    CrossingLeg,
    CrossingResult,
    continue_bouncing,
    cross_collision,
    default_delta,
    integrate_classical,
    sandwich_check,
    singular_part,
    SandwichReport,
)
from .period import (
    PeriodSample,
    Regime,
    ScanReport,
    monotonicity_scan,
    period_bouncing,
    period_classical,
    period_closed_form_half,
    period_derivative,
    period_extended,
)
from .potential import (
    GeneralPotential,
    PowerLawPotential,
    energy_gap_from,
    eval_derivatives,
    gamma_threshold,
    schaaf_expression,
    schaaf_expression_closed_form,
    schaaf_integrands,
    turning_points,
)
from .quadrature import QuadResult, tanh_sinh
from .successor import (
    GammaLadder,
    JacobianReport,
    SectionPoint,
    TwistProfile,
    gamma_ladder,
    jacobian,
    successor,
    successor_iterate,
    twist_profile,
)

__version__ = "0.1.0"
