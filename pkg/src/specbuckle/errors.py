"""Exception types raised by specbuckle."""


class SpecbuckleError(Exception):
    """Base class for all library errors."""


class DomainError(SpecbuckleError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(SpecbuckleError, OverflowError):
    """A result is not representable in double precision or integer range."""


class ConvergenceError(SpecbuckleError, RuntimeError):
    """A root finder failed to bracket or converge."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics

    def __str__(self):
        base = super().__str__()
        if not self.diagnostics:
            return base
        extra = ", ".join(f"{k}={v!r}" for k, v in self.diagnostics.items())
        return f"{base} ({extra})"


class ResourceError(SpecbuckleError, MemoryError):
    """A requested enumeration exceeds the configured size cap."""


class EnumerationRangeError(SpecbuckleError, ValueError):
    """A query asks about values above the enumeration ceiling of a spectrum."""


class InsufficientSpectrumError(SpecbuckleError, ValueError):
    """A check needs more eigenvalues than the supplied spectrum holds."""
