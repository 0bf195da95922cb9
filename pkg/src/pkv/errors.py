"""Exception hierarchy shared by all modules."""


class PKVError(Exception):
    """Base class for errors raised by this package."""


class UnknownVariableError(PKVError, KeyError):
    pass


class MissingAssignmentError(PKVError, KeyError):
    pass


class DimensionError(PKVError, ValueError):
    pass


class SingularMatrixError(PKVError, ArithmeticError):
    def __init__(self, message: str, rank: int):
        super().__init__(message)
        self.rank = rank


class RealificationError(PKVError, ValueError):
    """A realified component kept a nonzero imaginary part."""


class NoClosedFormError(PKVError, ValueError):
    pass


class IllConditionedError(PKVError, ValueError):
    pass


class ConfigError(PKVError, ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        super().__init__(message)
        self.line = line
        self.key = key


class InconsistentSystemError(PKVError, ValueError):
    pass
