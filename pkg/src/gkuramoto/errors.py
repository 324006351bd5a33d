"""Exception types shared across the package."""


class UsageError(ValueError):
    """Raised when inputs violate a documented precondition."""


class NumericalError(RuntimeError):
    """Raised when an integration or root-finding step fails numerically."""


class ConfigError(UsageError):
    """Raised for invalid experiment configuration; message names the field."""
