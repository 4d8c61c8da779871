"""Exception hierarchy shared by all modules."""


class PWCyclesError(Exception):
    """Base class for every error raised by the package."""


class NotDivergenceFree(PWCyclesError):
    """The quadratic first-integral construction needs ``div F == 0``."""


class DegenerateField(PWCyclesError):
    """The field vanishes identically."""


class TooManyRoots(PWCyclesError):
    """More tangencies than a degree-2 trigonometric polynomial can have."""


class NotSlidingPoint(PWCyclesError):
    """The sliding field was requested outside the sliding/escape region."""


class DivisionDegenerate(PWCyclesError):
    """``Yh - Xh`` is too small to form the Filippov convex combination."""


class BoundViolation(PWCyclesError):
    """More crossing cycles were found than the class bound allows.

    The offending report is attached as ``self.report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class GenericityViolation(PWCyclesError):
    """A genericity condition of the closed-form constant-field solution fails."""


class FoldOnCycle(PWCyclesError):
    """A half-return map is not invertible at a cycle angle."""


class StallOnSigma(PWCyclesError):
    """Start point on the switching curve with (numerically) tangential motion."""


class EventLoopGuard(PWCyclesError):
    """Too many switching events; suspected chattering."""


class ScenarioError(PWCyclesError):
    """Invalid scenario document; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
