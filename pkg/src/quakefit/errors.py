"""Exception hierarchy. Each category carries the CLI exit code."""


class QuakefitError(Exception):
    exit_code = 1
    category = "error"


class InputOutputError(QuakefitError):
    exit_code = 2
    category = "io"


class ParseError(QuakefitError):
    exit_code = 3
    category = "parse"


class ConfigError(QuakefitError):
    exit_code = 4
    category = "config"


class NumericError(QuakefitError):
    exit_code = 5
    category = "numeric"


class CompatibilityError(QuakefitError):
    exit_code = 6
    category = "compatibility"


class EmptyDatasetError(ParseError):
    """Raised when a data file yields no usable rows."""


class RowParseError(ParseError):
    """Raised in strict mode for a malformed row; message carries the line number."""


class DegenerateColumnError(NumericError):
    """Raised when a column is constant and cannot be normalized."""


class SplitTooSmallError(ConfigError):
    """Raised when a train/test split would leave one side empty."""


class CodecError(NumericError):
    """Raised on parameter-vector length mismatches."""


class ShapeError(NumericError):
    """Raised on dimension mismatches in numeric inputs."""


class ObjectiveError(NumericError):
    """Raised when a cost function returns a non-finite value."""


class DegenerateCorrelationError(NumericError):
    """Raised when a correlation is requested for a constant vector."""
