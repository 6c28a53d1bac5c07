"""Exception hierarchy; the CLI maps each class to an exit code."""


class RealDCPError(Exception):
    exit_code = 1


class InputError(RealDCPError, ValueError):
    """Malformed or out-of-domain input."""

    exit_code = 2


class ResourceError(RealDCPError, RuntimeError):
    """A configured size guard was exceeded."""

    exit_code = 3


class ConsistencyError(RealDCPError, RuntimeError):
    """An internal cross-check failed. Always a bug, never bad input."""

    exit_code = 4


class StructuralError(ConsistencyError):
    """A chain complex with d∘d ≠ 0."""
