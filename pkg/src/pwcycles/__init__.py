"""Crossing limit cycles of planar piecewise affine systems switched on a conic."""

from .cycles import (CrossingCycle, SolutionKind, SolutionSetReport, SolverConfig, Stability,
                     closing_residual, continuum_test, detect_homoclinic, find_cycles,
                     half_map, poincare_derivative, residual_jacobian, theorem_a_closed_form)
from .errors import (BoundViolation, NotDivergenceFree, PWCyclesError, ScenarioError)
from .fields import (AffineField, QuadraticIntegral, SingularityKind, classify_singularity,
                     divergence, first_integral)
from .flow import AffineFlow, exact_flow, integrate_filippov, next_switching_event
from .switching import (UNIT_CIRCLE, SigmaKind, SwitchingConic, classify_on_sigma,
                        lie_derivative, sliding_field, tangency_points)
from .system import ClassTag, PiecewiseSystem

__all__ = [
    "AffineField",
    "AffineFlow",
    "BoundViolation",
    "ClassTag",
    "CrossingCycle",
    "NotDivergenceFree",
    "PWCyclesError",
    "PiecewiseSystem",
    "QuadraticIntegral",
    "ScenarioError",
    "SigmaKind",
    "SingularityKind",
    "SolutionKind",
    "SolutionSetReport",
    "SolverConfig",
    "Stability",
    "SwitchingConic",
    "UNIT_CIRCLE",
    "classify_on_sigma",
    "classify_singularity",
    "closing_residual",
    "continuum_test",
    "detect_homoclinic",
    "divergence",
    "exact_flow",
    "find_cycles",
    "first_integral",
    "half_map",
    "integrate_filippov",
    "lie_derivative",
    "next_switching_event",
    "poincare_derivative",
    "residual_jacobian",
    "sliding_field",
    "tangency_points",
    "theorem_a_closed_form",
]

__version__ = "0.1.0"
