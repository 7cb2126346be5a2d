"""Exception hierarchy shared by all modules."""


class QecEntropyError(Exception):
    """Base class for every error raised by this package."""


class NotSquareError(QecEntropyError, ValueError):
    pass


class NotHermitianError(QecEntropyError, ValueError):
    pass


class NoConvergenceError(QecEntropyError, RuntimeError):
    pass


class DimensionMismatchError(QecEntropyError, ValueError):
    pass


class DimensionCapError(QecEntropyError, ValueError):
    pass


class OutOfRangeError(QecEntropyError, ValueError):
    pass


class InvalidStateError(QecEntropyError, ValueError):
    pass


class ZeroTraceError(QecEntropyError, ValueError):
    pass


class NotADistributionError(QecEntropyError, ValueError):
    pass


class BadPriorsError(QecEntropyError, ValueError):
    pass


class CountMismatchError(QecEntropyError, ValueError):
    pass


class FitError(QecEntropyError, RuntimeError):
    """Polynomial or log-log fit could not be carried out reliably."""


class DegenerateOperatorError(QecEntropyError, ValueError):
    """An error operator collapses part of the codespace."""


class IncompleteRecoveryError(QecEntropyError, ValueError):
    pass


class NotInCodespaceError(QecEntropyError, ValueError):
    pass


class ParseError(QecEntropyError, ValueError):
    pass


class ValidationError(QecEntropyError, ValueError):
    pass
