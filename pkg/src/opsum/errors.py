"""Exception types shared across the pipeline.

Every error that can reach the CLI carries a short machine-readable class
name (``err.code``) so callers can branch without parsing prose.
"""


class OpsumError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"


class ParseError(OpsumError):
    """A line of an input file could not be decoded or parsed."""

    code = "parse-error"

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class ValidationError(OpsumError):
    """Well-formed input that violates a documented invariant."""

    code = "validation-error"


class ConfigError(OpsumError):
    """Bad or inconsistent configuration."""

    code = "config-error"
