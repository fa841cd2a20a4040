"""Exception types shared across the package."""


class ChordelimError(Exception):
    """Base class for all chordelim errors."""


class InvalidVertexError(ChordelimError):
    """Vertex label is out of range or not active."""


class EmptyGraphError(ChordelimError):
    """Operation requires at least one active vertex."""


class InvalidOrderingError(ChordelimError):
    """Ordering is not a permutation of the active vertices."""


class PolicyContractError(ChordelimError):
    """A policy produced a distribution that violates its contract."""


class ParamsContractError(ChordelimError):
    """Network parameters or tape do not match the expected shapes."""


class ConfigError(ChordelimError):
    """Invalid configuration or argument value."""


class FormatError(ChordelimError):
    """Malformed or wrong-version serialized data."""


class MatrixMarketParseError(FormatError):
    """Matrix Market file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MatrixMarketRejectError(ChordelimError):
    """Matrix Market file is well-formed but unusable (e.g. non-square)."""


class NormalizationError(ChordelimError):
    """A normalization baseline is zero, leaving the ratio undefined."""
