"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so each class sits under exactly one of
the four families: validation, degenerate misuse, numerical failure, I/O.
"""


class TranslatorError(Exception):
    """Base class for all package errors."""


# validation (exit code 3)
class ValidationError(TranslatorError, ValueError):
    pass


class ParameterError(ValidationError):
    """Invalid (family, n, k) combination or malformed argument."""


class ExpressionError(ValidationError):
    """A custom speed expression could not be parsed."""


class SpeedValidationError(ValidationError):
    """A custom speed failed the sampled homogeneity / monotonicity checks."""


class ConfigError(ValidationError):
    pass


# degenerate misuse (exit code 2)
class DegenerateSpeed(TranslatorError, ValueError):
    """The speed satisfies f(0, 1) <= 0 and cannot be normalized."""


# numerical failures (exit code 1)
class NumericalError(TranslatorError, ArithmeticError):
    pass


class DomainError(NumericalError):
    """Evaluation outside the admissible cone of the speed."""


class NoBracket(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


class DegenerateDerivative(NumericalError):
    pass


class StepUnderflow(NumericalError):
    pass


class ConeExit(NumericalError):
    def __init__(self, message, r=None):
        super().__init__(message)
        self.r = r


class InsufficientRange(NumericalError):
    pass


class NonConvex(NumericalError):
    pass


class RangeError(NumericalError, OverflowError):
    pass
