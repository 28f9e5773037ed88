"""Exception types raised across the package."""


class QStabilityError(ValueError):
    """Base class for invalid inputs and failed numerical procedures."""


class DimensionError(QStabilityError):
    pass


class NormalizationError(QStabilityError):
    pass


class InvalidStateError(QStabilityError):
    pass


class ChannelError(QStabilityError):
    pass


class DomainError(QStabilityError):
    """A parameter lies outside the region where a formula is defined."""


class QuadratureError(QStabilityError):
    """Adaptive quadrature did not reach the requested tolerance."""


class FitError(QStabilityError):
    pass


class SchemaError(QStabilityError):
    """A calibration document violates the expected schema."""
