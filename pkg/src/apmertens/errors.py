"""Exception types shared across the package."""


class ApMertensError(Exception):
    """Base class for package errors."""


class TableRangeError(ApMertensError, ValueError):
    """A query reaches beyond the prime table, or below its domain."""


class CacheCorruptError(ApMertensError):
    """A sieve cache file failed validation; the table must be rebuilt."""


class ConsistencyError(ApMertensError, ArithmeticError):
    """Two routes to the same quantity disagree beyond tolerance."""


class BranchTrackingError(ConsistencyError):
    """Argument continuation of log L(s, chi) failed along the real path."""
