"""Exception types shared across the toolkit.

All inherit ValueError so callers can catch broadly; the CLI maps any of
them to exit code 2.
"""


class ShapeError(ValueError):
    """Operand dimensions disagree with an operation's contract."""


class ConfigurationError(ValueError):
    """A parameter value (kernel size, stride, threshold, ...) is invalid."""


class DomainError(ValueError):
    """Input values lie outside an operation's mathematical domain."""


class DegeneracyError(DomainError):
    """A fit or normalization is undefined for this input (rank deficiency,
    constant data, zero median)."""
