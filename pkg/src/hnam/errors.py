"""Exception taxonomy shared across the package."""


class HnamError(Exception):
    """Base class for all package errors."""


class ShapeError(HnamError, ValueError):
    """Tensor shapes incompatible with the requested operation."""


class ConfigError(HnamError, ValueError):
    """Invalid configuration value."""


class DataError(HnamError, ValueError):
    """Malformed or inconsistent input data."""


class FitError(HnamError, ValueError):
    """Statistics or parameters cannot be fitted from the given data."""


class UsageError(HnamError, RuntimeError):
    """API called in an unsupported order or state."""


class DivergenceError(HnamError, RuntimeError):
    """Training produced a non-finite loss."""

