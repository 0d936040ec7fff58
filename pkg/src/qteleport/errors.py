"""Exception types raised by qteleport."""


class QTeleportError(Exception):
    """Base class for all library errors."""


class NotNormalized(QTeleportError, ValueError):
    pass


class BadFactorIndex(QTeleportError, IndexError):
    pass


class DimensionMismatch(QTeleportError, ValueError):
    pass


class NotOrthonormalInput(QTeleportError, ValueError):
    pass


class CompletionFailure(QTeleportError, RuntimeError):
    pass


class NonFiniteParameter(QTeleportError, ValueError):
    pass


class InvalidDensityOperator(QTeleportError, ValueError):
    """Matrix is not Hermitian, not unit trace, or not positive semidefinite."""
