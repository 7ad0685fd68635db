"""Exception types shared across the package.

Argument validation failures (bad sizes, inverted intervals, out-of-domain
points) raise ValueError subclasses so callers can catch them uniformly;
runtime numerical breakdowns raise RuntimeError subclasses and carry enough
context to reproduce the failing case.
"""


class InvalidSizeError(ValueError):
    """Matrix size or trial count outside the allowed range."""


class ShapeError(ValueError):
    """Input arrays have inconsistent or unexpected shapes/symmetry."""


class InvalidDataError(ValueError):
    """Input contains NaN or infinite entries where finite data is required."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of the function."""


class DegenerateInputError(ValueError):
    """Input is a measure-zero degenerate configuration (e.g. exact ties)."""


class UnsupportedError(ValueError):
    """Requested option is outside the supported set (e.g. beta not in {1,2,4})."""


class NumericalRangeError(ArithmeticError):
    """A value cannot be represented without overflow in double precision."""


class NumericalFailureError(RuntimeError):
    """An iterative numerical procedure failed to converge.

    The ``context`` dict carries diagnostics (seed, size, tolerances) so the
    failing configuration can be replayed.
    """

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = dict(context)


class DiscretizationFailureError(NumericalFailureError):
    """A discretized operator violated a structural bound (raise the order)."""
