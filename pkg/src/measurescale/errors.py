"""Exception and warning types shared across the package."""


class MeasureScaleError(Exception):
    """Base class for all package errors."""


class DimensionError(MeasureScaleError, ValueError):
    """Operand shapes are incompatible."""


class SingularMatrixError(MeasureScaleError, ArithmeticError):
    """A linear solve hit a pivot below the singularity threshold."""


class NumericError(MeasureScaleError, ArithmeticError):
    """An iterative numerical routine failed to converge."""


class ValidationError(MeasureScaleError, ValueError):
    """A structural residual exceeded its tolerance.

    The offending residual is kept on ``residual`` so callers (the CLI in
    particular) can report it.
    """

    def __init__(self, message, residual=float("nan")):
        super().__init__(message)
        self.residual = float(residual)


class HypothesisError(MeasureScaleError, ValueError):
    """Scale-formula preconditions do not hold for the given taps."""


class MultiplicityError(HypothesisError):
    """The dominant eigenvalue is (numerically) repeated."""


class DegenerateSpectrumError(MeasureScaleError, ArithmeticError):
    """The dominant eigenvalue also lies in the spectrum of the compression."""


class ResourceError(MeasureScaleError, RuntimeError):
    """A requested enumeration exceeds its configured budget."""


class DeadStateError(MeasureScaleError, RuntimeError):
    """Every measurement channel annihilated the current state."""


class UnknownSystemError(MeasureScaleError, KeyError):
    """No builtin system with the requested name."""


class DivergenceWarning(RuntimeWarning):
    """Cascade iterates stopped contracting."""


class SlowConvergenceWarning(RuntimeWarning):
    """Spectral gap too close to 1 for the requested asymptotic check."""
