"""Exception taxonomy shared across the toolkit.

CLI exit codes: config errors map to 2, data errors to 3, numerical
errors to 4 (see cli.py).
"""


class WmcError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(WmcError, ValueError):
    """Shapes or index ranges do not line up."""


class DomainError(WmcError, ValueError):
    """A value is outside the mathematical domain of the operation."""


class ContractError(WmcError, ValueError):
    """An input violates a documented precondition (e.g. asymmetry)."""


class NumericalError(WmcError, RuntimeError):
    """An iterative routine failed to converge or diverged."""

    def __init__(self, message, iterations=None, trace=None):
        super().__init__(message)
        self.iterations = iterations
        self.trace = list(trace) if trace is not None else None


class CapacityError(WmcError, RuntimeError):
    """A dense materialization exceeds the desk-scale size guard."""


class ReductionRequiredError(WmcError, ValueError):
    """The pattern has empty rows/columns; drop them and retry (lists attached)."""

    def __init__(self, message, empty_rows=(), empty_cols=()):
        super().__init__(message)
        self.empty_rows = list(empty_rows)
        self.empty_cols = list(empty_cols)


class NonnegativityError(WmcError, ValueError):
    """A computed weight factor came out negative beyond tolerance."""


class RetryExhaustedError(WmcError, RuntimeError):
    """Randomized generation failed after the retry cap."""


class PatternParseError(WmcError, ValueError):
    """A pattern or ratings file failed to parse (carries the line number)."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class ConfigError(WmcError, ValueError):
    """An experiment configuration is invalid."""
