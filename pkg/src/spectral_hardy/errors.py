"""Exception hierarchy shared by the numerical modules."""


class SpectralHardyError(Exception):
    """Base class for all library errors."""


class ParameterRangeError(SpectralHardyError, ValueError):
    """An input lies outside the supported parameter box."""


class DomainError(SpectralHardyError, ValueError):
    """An input lies outside the mathematical domain of a function."""


class PoleError(DomainError):
    """Evaluation at a pole (e.g. Gamma at a non-positive integer)."""


class QuadratureError(SpectralHardyError, RuntimeError):
    """A quadrature or extrapolation did not reach its target accuracy."""
