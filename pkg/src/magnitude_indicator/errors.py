"""Exception types raised by the library.

All errors derive from :class:`MagnitudeError`, which is a ``ValueError`` so
callers that only care about bad input can catch the builtin.
"""


class MagnitudeError(ValueError):
    """Base class for all library errors."""


class DimensionMismatch(MagnitudeError):
    pass


class AnchorAbovePoint(MagnitudeError):
    pass


class IndexOutOfRange(MagnitudeError):
    pass


class InvalidLevel(MagnitudeError):
    pass


class TooManyPoints(MagnitudeError):
    pass


class NegativeLength(MagnitudeError):
    pass


class SingularSimilarityMatrix(MagnitudeError):
    pass


class InvalidMu(MagnitudeError):
    pass


class InvalidTriple(MagnitudeError):
    pass


class UnsortedParameters(MagnitudeError):
    pass


class InvalidBounds(MagnitudeError):
    pass


class InfeasiblePoint(MagnitudeError):
    pass


class InfeasibleStart(MagnitudeError):
    pass


class NonFiniteObjective(MagnitudeError):
    pass


class PerturbationLeavesSimplex(MagnitudeError):
    pass


class PointNotOnGrid(MagnitudeError):
    pass
