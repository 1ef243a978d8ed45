"""Exception hierarchy for qwpinpaint.

Every error carries the process exit code the CLI reports for it.
"""


class QwpError(Exception):
    """Base exception for qwpinpaint errors."""
    exit_code = 1


class MissingFileError(QwpError):
    """Raised when an input file does not exist."""
    exit_code = 3


class ConfigError(QwpError, ValueError):
    """Raised when a configuration key or value is invalid."""
    exit_code = 4


class PgmFormatError(QwpError, ValueError):
    """Raised when a PGM file is malformed, truncated or unsupported."""
    exit_code = 5


class FilterBankError(QwpError, ValueError):
    """Raised when a filter bank cannot be built for the requested sizes."""
    exit_code = 6


class TransformError(QwpError, ValueError):
    """Raised on length mismatches, level overflow or incomplete trees."""
    exit_code = 6


class InpaintError(QwpError, ValueError):
    """Raised when inpainting inputs are inconsistent."""
    exit_code = 7
