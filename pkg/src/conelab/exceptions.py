"""Exception hierarchy shared by every conelab module."""


class ConeLabError(ValueError):
    """Base class for all input and domain errors raised by conelab."""


class NonPrimeError(ConeLabError):
    pass


class EvenCharacteristicError(ConeLabError):
    pass


class DegreeZeroError(ConeLabError):
    pass


class FieldDivisionByZero(ConeLabError, ZeroDivisionError):
    pass


class DimensionTooSmallError(ConeLabError):
    pass


class OverflowLimitError(ConeLabError, OverflowError):
    """Raised when q**d exceeds the configured point limit."""


class WrongSideError(ConeLabError):
    pass


class SideMismatchError(ConeLabError):
    pass


class SpecMismatchError(ConeLabError):
    pass


class BadExponentError(ConeLabError):
    pass


class EmptyVarietyError(ConeLabError):
    pass


class SupportViolationError(ConeLabError):
    pass


class ZeroFunctionError(ConeLabError):
    pass


class TooLargeError(ConeLabError):
    pass


class BadParamsError(ConeLabError):
    pass


class UnknownCheckError(ConeLabError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


class ParityMismatchError(ConeLabError):
    pass
