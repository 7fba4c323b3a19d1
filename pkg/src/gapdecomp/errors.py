"""Exception hierarchy.

Two branches matter to callers: ``InputError`` covers everything wrong
with what the user handed us (files, schemas, configs, shapes), and
``NumericError`` covers estimation or diagnostic failures on valid
input.  The CLI maps the branches to exit codes 2 and 3.
"""


class GapdecompError(Exception):
    """Base class for all package errors."""


class InputError(GapdecompError):
    """Invalid input: files, schemas, configuration, shapes."""


class ParseError(InputError):
    """Malformed file content; carries the 1-based row number when known."""

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class SchemaError(InputError):
    """Schema does not describe the data file."""


class DataError(InputError):
    """Data violates a structural requirement (empty, wrong values)."""


class DegeneracyError(DataError):
    """A categorical variable has fewer than two non-empty categories."""


class ConfigError(InputError):
    """Invalid configuration value or missing required option."""


class ShapeError(InputError):
    """Array dimensions or column labels do not line up."""


class NumericError(GapdecompError):
    """Estimation or diagnostic failure on structurally valid input."""


class EstimationError(NumericError):
    """Model fitting failed."""


class CollinearityError(EstimationError):
    """Singular information matrix; names the offending columns."""

    def __init__(self, message: str, columns: tuple[str, ...] = ()):
        super().__init__(message)
        self.columns = tuple(columns)


class NonConvergenceError(EstimationError):
    """Iterations exhausted or likelihood diverged."""


class DiagnosticError(NumericError):
    """A diagnostic is undefined for the given fit or data."""


class UndefinedPercentageError(NumericError):
    """Percentage contributions are undefined because the gap is zero."""


class OracleError(NumericError):
    """A brute-force reference routine exceeded its evaluation budget."""


class CollinearityWarning(UserWarning):
    """Near-singular design detected; results may be unstable."""
