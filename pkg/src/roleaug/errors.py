"""Exception types shared across the package."""


class RoleaugError(Exception):
    """Base class for all package errors."""


class DataError(RoleaugError):
    """Invalid or inconsistent input data (bad records, dimensions, labels)."""


class ConfigError(RoleaugError):
    """Invalid configuration value or combination."""
