"""Shared exception types.

Every error raised on purpose by this package derives from GeometryError,
so callers (and the CLI) can distinguish numerical/geometric failures from
programming errors.
"""


class GeometryError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(GeometryError):
    """Operands have incompatible dimensions."""


class HyperquadricError(GeometryError):
    """A vector fails a required quadric membership test (beyond tolerance)."""


class ChartDomainError(GeometryError):
    """A chart point is outside its admissible range or domain, or a
    finite-difference stencil around it escapes the domain."""


class ImmersionError(GeometryError):
    """The map is degenerate at the requested point or scale."""


class SingularParameterError(GeometryError):
    """A formula is evaluated at an excluded parameter value (a pole)."""


class RootBracketError(GeometryError):
    """A root bracket does not straddle a sign change, or the root fails
    its validation conditions."""


class SamplingError(GeometryError):
    """A sample set is empty, too coarse, or otherwise unusable."""
