"""
Exceptions raised by the friable-averages library.

Library code raises these; only friable_averages.py turns them into exit codes.
"""


class FriableError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FriableError, ValueError):
    """Argument outside the domain of the requested operation."""


class DepthError(DomainError):
    """Derivative order above the depth carried by a solution."""


class ConvergenceError(FriableError, ArithmeticError):
    """An iteration or a product failed to converge."""


class RangeError(FriableError, ValueError):
    """x or y outside what the sieve covers."""


class SieveLimitError(FriableError, MemoryError):
    pass


class ConfigError(FriableError, ValueError):
    pass
