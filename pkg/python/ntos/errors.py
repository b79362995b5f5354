"""
Exception hierarchy shared by every ntos module.
"""
from __future__ import annotations


class NtosError(Exception):
    """Base class for all ntos errors."""


class EmptyRangeError(NtosError, ValueError):
    """Raised when a range contains nothing to compute (e.g. sieve limit < 2)."""


class PreconditionError(NtosError, ValueError):
    """Raised when an operation is called outside its preconditions."""


class UndefinedOrderError(PreconditionError):
    """Raised when the multiplicative order of a modulo p is asked for p | a."""


class ContractViolation(PreconditionError):
    """Raised when an experiment is run with y > x."""


class DomainError(NtosError, ValueError):
    """Raised when a real argument lies outside a function's domain."""


class ResourceError(NtosError, RuntimeError):
    """Raised when a memory or work budget would be exceeded."""


class CacheError(NtosError, ValueError):
    """Raised when a prime-table cache file fails validation."""


class VerificationFailed(NtosError, AssertionError):
    """Raised by the invariant suite when a check does not hold."""
