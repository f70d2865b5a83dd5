"""Exception types shared across the package."""


class DtnLabError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(DtnLabError, ValueError):
    """A parameter is outside the domain an operation supports."""


class ConvergenceError(DtnLabError, ArithmeticError):
    """A series or iteration failed to reach its stopping criterion."""


class ScaleOverflowError(DtnLabError, OverflowError):
    """A value left the representable double range.

    The log-scaled companions (``*_log`` variants) stay valid in this
    regime; callers that hit this error should switch to them.
    """


class PoleError(DtnLabError, ZeroDivisionError):
    """Evaluation requested at a pole of the function."""


class ConditioningError(DtnLabError, ArithmeticError):
    """A denominator is too close to zero for a trustworthy result.

    Carries ``detail`` with the measured smallness and, when cheap to
    compute, the distance to the nearest offending point.
    """

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}


class RegularityError(DtnLabError):
    """An energy window fails the spectral-gap requirement.

    ``witness`` holds the offending eigenvalue and its distance.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConditioningWarning(UserWarning):
    """A denominator is small enough to cost digits, though still usable."""


class TruncationWarning(UserWarning):
    """A mode or degree cutoff is discarding mass above the noise floor."""


class PreconditionWarning(UserWarning):
    """A caller-guaranteed bound looks violated by the measured data."""


class CapabilityError(DtnLabError, NotImplementedError):
    """A requested combination of parameters is outside the supported scope."""
