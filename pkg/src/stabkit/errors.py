"""Exception types shared across the package."""


class StabkitError(Exception):
    """Base class for package-specific failures."""


class SizeMismatchError(StabkitError, ValueError):
    """Operands act on different qubit counts."""


class ValidityError(StabkitError, ValueError):
    """A stabilizer group or Clifford element violates its invariants."""


class CapacityError(StabkitError, ValueError):
    """A brute-force oracle request exceeds its size cap."""


class ConfigError(StabkitError, ValueError):
    """An experiment or CLI configuration is inconsistent."""


class ArityError(ConfigError):
    """A partition has the wrong number of parties for the operation."""


class ParseError(StabkitError, ValueError):
    """A text input failed to parse; carries line/column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column
