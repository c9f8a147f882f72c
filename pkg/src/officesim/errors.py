"""Exception hierarchy shared across the package.

``DomainError`` subclasses are input problems (bad files, bad configs) and map to
CLI exit code 1; ``NumericError`` means the simulation itself failed (exit 2).
"""


class DomainError(Exception):
    """Bad input: a configuration, file or request the package cannot accept."""


class ConfigError(DomainError, ValueError):
    pass


class StructuralError(DomainError, ValueError):
    """Inputs are individually valid but do not fit together (counts, grids, years)."""


class ParseError(DomainError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NumericError(ArithmeticError):
    """Non-finite inputs, singular systems or a diverging integration."""
