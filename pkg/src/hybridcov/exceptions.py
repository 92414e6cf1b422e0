"""Exception hierarchy.

Two families matter to callers: input problems (bad shapes, bad values,
unreadable files) and numerical degeneracy (the data are valid but the
statistic is undefined for them). The CLI maps them to distinct exit codes.
"""


class CovTestError(Exception):
    """Base class for every error raised by this package."""


class InputError(CovTestError, ValueError):
    pass


class DimensionError(InputError):
    pass


class DomainError(InputError):
    pass


class InsufficientSampleError(InputError):
    pass


class ConfigError(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class EmptyInputError(ParseError):
    pass


class NumericalDegeneracyError(CovTestError, ArithmeticError):
    pass


class DegenerateVarianceError(NumericalDegeneracyError):
    pass


class DegenerateSpectrumError(NumericalDegeneracyError):
    pass


class DegenerateDataError(NumericalDegeneracyError):
    pass


class NotPSDError(NumericalDegeneracyError):
    pass


class RootFindingError(NumericalDegeneracyError):
    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval
