"""
Exception hierarchy shared by the library and the command-line tasks.

Every class carries the exit code the task scripts return when it escapes a
command, so the mapping from failure kind to exit code lives in one place:

    0 success, 1 usage, 2 input validation, 3 numerical failure.
"""

from numpy.linalg import LinAlgError


class EstimationError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 3


class UsageError(EstimationError):
    """Invalid command-line usage (unknown flag, non-positive trial count, ...)."""

    exit_code = 1


class InputValidationError(EstimationError, ValueError):
    """Input data or configuration failed validation."""

    exit_code = 2


class DimensionError(InputValidationError):
    """Array shapes are empty or mutually inconsistent."""


class SymmetryError(InputValidationError):
    """A covariance block is not Hermitian / complex-symmetric within tolerance."""


class PropernessError(InputValidationError):
    """Noise is improper where the estimator requires proper noise."""


class ConfigurationError(InputValidationError):
    """Missing or unsupported configuration (unknown estimator, missing prior, ...)."""


class ModelFileError(InputValidationError):
    """A model, config or measurement file could not be parsed."""


class NumericalError(EstimationError, ArithmeticError):
    """Numerical failure during estimation."""

    exit_code = 3


class SingularityError(NumericalError):
    """A matrix that must be positive definite failed to factorize."""


class RankError(NumericalError):
    """The measurement matrix does not have full column rank."""


class ConsistencyError(NumericalError):
    """An internal consistency check on an augmented result failed."""


class NotFittedError(EstimationError, RuntimeError):
    """An estimator was used before `fit` was called."""


def exit_code_for(error: BaseException) -> int:
    """
    Exit code for an exception escaping a task: the class's own code for
    package errors, 3 for unwrapped factorization failures, 2 for other value
    and file errors (parse failures, missing files), 3 otherwise.
    """
    if isinstance(error, EstimationError):
        return error.exit_code
    if isinstance(error, LinAlgError):
        return NumericalError.exit_code
    if isinstance(error, (ValueError, OSError)):
        return InputValidationError.exit_code
    return NumericalError.exit_code
