"""Exception hierarchy shared by every module.

Each class carries the process exit code the CLI reports for it.
"""


class DrivenBSError(Exception):
    exit_code = 1


class ConfigurationError(DrivenBSError, ValueError):
    """Parameters that describe an impossible or unsupported setup."""

    exit_code = 2


class DimensionError(ConfigurationError):
    """Array shapes that do not fit together."""


class ConservationError(ConfigurationError):
    """Input and output photon numbers differ."""


class DomainError(ConfigurationError):
    """Scalar argument outside its mathematical domain."""


class SizeLimitError(DrivenBSError):
    """Problem too large for exact enumeration."""

    exit_code = 3


class NumericError(DrivenBSError, ArithmeticError):
    """An internal numerical cross-check failed."""

    exit_code = 4
