"""Exception types shared across the package."""


class KnotsteerError(Exception):
    """Base class for all package errors."""


class InvalidArgument(KnotsteerError, ValueError):
    """A caller-supplied value violates a documented precondition."""


class DegenerateProjection(KnotsteerError):
    """Projected curve is not in generic position (tangency, triple point,
    vertex-on-segment, or coincident projected vertices)."""


class ComplexityLimit(KnotsteerError):
    """Diagram exceeds the crossing budget of a state-sum computation."""


class NumericalDegeneracy(KnotsteerError):
    """Too many directions stayed degenerate after perturbation retries."""


class InvalidConfiguration(KnotsteerError):
    """A chain configuration violates the model constraints (overlaps,
    overstretched bonds, non-finite coordinates)."""


class IntegrationBlowup(KnotsteerError):
    """A bond approached its maximum extension; the timestep is too large."""


class CalibrationFailure(KnotsteerError):
    """Iterative calibration of a model parameter did not converge."""


class SteeringAbort(KnotsteerError):
    """Every candidate in a steering iteration failed to propagate."""


class EmptyInput(KnotsteerError):
    """An input file or record stream contained no usable data."""


class DegeneratePartition(KnotsteerError):
    """A dataset partition left one of the subsets empty."""
