"""Exception hierarchy shared by all heiscurves modules."""


class HeisenbergError(Exception):
    """Base class for every error raised deliberately by this package."""


class NotRegularError(HeisenbergError, ValueError):
    """The curve is not horizontally regular where it is required to be."""


class DegeneracyError(HeisenbergError):
    """The horizontal jet does not have the complex rank the caller asked for.

    Usually means the curve should be classified and reduced first.
    """


class ConditioningError(HeisenbergError):
    """A constructed frame drifted too far from orthonormality."""


class ResolutionError(HeisenbergError):
    """The sampling grid is too coarse for the requested differentiation."""


class StepSizeError(HeisenbergError):
    """The integrator step is too large to keep the path on the group."""


class InconsistencyError(HeisenbergError):
    """Two numerical routes that must agree did not (order scan, reduction, alignment)."""


class FormatError(HeisenbergError, ValueError):
    """A curve, profile or symmetry file could not be parsed."""
