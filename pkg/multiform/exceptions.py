"""Exceptions for the multiform optimization library."""


class MultiformException(Exception):
    """Base class for all exceptions raised by the multiform library."""

    pass


class InvalidInputError(MultiformException):
    """Raised when an argument violates an operation's preconditions."""

    pass


class ConfigError(InvalidInputError):
    """Raised for invalid run or experiment configuration values."""

    pass


class SingularSystemError(MultiformException):
    """Raised when a transfer mapping cannot be solved without regularization."""

    pass


class OutputError(MultiformException):
    """Raised when experiment outputs cannot be written."""

    pass
