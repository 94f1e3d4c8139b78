"""Exception and warning types raised across the package."""


class FdmotorError(Exception):
    """Base class for all package errors."""


class DimensionError(FdmotorError, ValueError):
    """Requested dimension or shape is out of range."""


class LengthMismatch(FdmotorError, ValueError):
    pass


class GridMismatch(FdmotorError, ValueError):
    pass


class ZeroWeight(FdmotorError, ValueError):
    """A quadrature weight is zero, so W^{-1/2} does not exist."""


class AllZeroVariance(FdmotorError, ValueError):
    pass


class NoZeroCrossing(FdmotorError, ValueError):
    pass


class ConstantSignal(FdmotorError, ValueError):
    pass


class TooShort(FdmotorError, ValueError):
    pass


class MalformedHeader(FdmotorError, ValueError):
    pass


class UnknownCondition(FdmotorError, ValueError):
    pass


class EmptyResult(FdmotorError, ValueError):
    pass


class NoRecords(FdmotorError, ValueError):
    """The corpus holds no records of the channel a stage needs."""


class NearDisconnected(UserWarning):
    """The kernel graph is numerically disconnected (lambda_1 ~ 1)."""
