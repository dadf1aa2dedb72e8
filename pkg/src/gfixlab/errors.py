"""Shared exception types."""


class GfixError(Exception):
    pass


class DimensionMismatchError(GfixError, ValueError):
    pass


class UnsupportedSetError(GfixError, ValueError):
    """Operation needs a convex set of a supported shape."""


class OutOfDomainError(GfixError, ValueError):
    def __init__(self, message, distance=None):
        super().__init__(message)
        self.distance = distance


class TruncationBudgetError(GfixError, RuntimeError):
    """Iterating further would silently drop nonzero coordinates."""


class EmptyWindowError(GfixError, ValueError):
    pass


class NoValidPairsError(GfixError, RuntimeError):
    """Sampling produced no usable pairs; the caller should report INCONCLUSIVE."""


class ConfigError(GfixError, ValueError):
    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
