"""Exception types raised across the package."""


class BspfError(Exception):
    """Base class for all library errors."""


class InvalidDomainError(BspfError, ValueError):
    pass


class NonMonotoneMapError(BspfError, ValueError):
    pass


class NonFiniteSampleError(BspfError, ValueError):
    pass


class InsufficientBasisError(BspfError, ValueError):
    pass


class OutOfDomainError(BspfError, ValueError):
    pass


class IndexOutOfRangeError(BspfError, IndexError):
    pass


class DimensionMismatchError(BspfError, ValueError):
    pass


class SingularSystemError(BspfError, ArithmeticError):
    pass


class SolverFailureError(BspfError, ArithmeticError):
    pass


class StepUnderflowError(BspfError, ArithmeticError):
    pass


class NaNDetectedError(BspfError, ArithmeticError):
    def __init__(self, step, message=None):
        self.step = step
        super().__init__(message or f"non-finite state detected at step {step}")


class DryingError(BspfError, ArithmeticError):
    pass


class GridTooSmallError(BspfError, ValueError):
    pass


class ConfigError(BspfError, ValueError):
    pass


class IllConditionedWarning(UserWarning):
    pass


class CFLWarning(UserWarning):
    pass
