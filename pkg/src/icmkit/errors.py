"""Exception hierarchy. Each class carries the CLI exit code for its error class."""


class IcmkitError(Exception):
    exit_code = 1


class ValidationError(IcmkitError, ValueError):
    """An input violates an operation's precondition."""

    exit_code = 3


class ConstructionError(IcmkitError):
    """A construction produced an object that fails its own invariants."""

    exit_code = 4


class ParseError(IcmkitError):
    """A file could not be decoded into the expected format."""

    exit_code = 5


class InvariantViolation(IcmkitError):
    """Internal consistency check failed; indicates a bug, not bad input."""

    exit_code = 6


class DecompositionError(IcmkitError):
    """A numerical decomposition did not converge."""

    exit_code = 7
