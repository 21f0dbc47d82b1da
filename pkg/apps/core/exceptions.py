"""
Exception hierarchy for the hardness toolkit.

Library code raises these; management commands translate them into exit
codes (see apps.core.management.base).
"""


class GahError(ValueError):
    """Base class for all domain errors."""


class VectorFormatError(GahError):
    """Malformed fvecs/ivecs file or non-finite vector values."""


class GraphFormatError(GahError):
    """Malformed graph file or adjacency violating graph invariants."""


class DimensionMismatchError(GahError):
    """Two vectors or vector sets disagree on dimensionality."""


class ParameterError(GahError):
    """A parameter is outside its admissible range."""


class InstanceTooLargeError(GahError):
    """An exhaustive oracle was asked to solve an instance beyond its limit."""


class EmptyComponentError(GahError):
    """A mixture component stayed empty after reseeding."""


class InsufficientDataError(GahError):
    """Not enough records (neighbors, candidates, rows) for the request."""


class ZeroVarianceError(GahError):
    """Correlation requested on a constant sequence."""
