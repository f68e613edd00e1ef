"""Exception types shared across the package."""


class CdottoError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(CdottoError, ValueError):
    """Operands act on different numbers of sites."""


class DomainError(CdottoError, ValueError):
    """Argument outside the mathematically valid range."""


class CapacityError(CdottoError, ValueError):
    """Requested dense object exceeds the configured size cap."""


class NumericalError(CdottoError, RuntimeError):
    """Propagation produced non-finite values."""


class ConfigError(CdottoError, ValueError):
    """Malformed or inconsistent run configuration."""
