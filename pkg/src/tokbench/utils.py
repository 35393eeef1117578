"""
Utility functions and infrastructure for tokbench.

Provides:
- Error handling and custom exceptions
- Logging configuration
- Input validation
- Safe file operations
- Formatting helpers for reports
"""

import logging
import os
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

# Configure logging
_handlers: list[logging.Handler] = [logging.StreamHandler()]
if os.getenv("TOKBENCH_LOG_FILE"):
    _handlers.append(logging.FileHandler(os.environ["TOKBENCH_LOG_FILE"], encoding="utf-8"))

logging.basicConfig(
    level=os.getenv("TOKBENCH_LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=_handlers,
)

logger = logging.getLogger("tokbench")


# Custom Exceptions
class TokbenchError(Exception):
    """Base exception for tokbench errors."""

    pass


class ValidationError(TokbenchError):
    """Raised when input validation fails."""

    pass


class ConfigError(ValidationError):
    """Raised when a configuration file or option is invalid."""

    pass


class DataError(TokbenchError):
    """Raised when input data cannot be interpreted."""

    pass


class MalformedRowError(DataError):
    """Raised when a CSV row is not valid RFC-4180 or does not have exactly three fields."""

    def __init__(self, row_number: int, field_count: Optional[int] = None, reason: str = ""):
        self.row_number = row_number
        self.field_count = field_count
        detail = reason or f"expected 3 fields, got {field_count}"
        super().__init__(f"Row {row_number}: {detail}")


class InvalidLabelError(DataError):
    """Raised when a CSV label is not 1 or 2."""

    def __init__(self, row_number: int, value: str):
        self.row_number = row_number
        self.value = value
        super().__init__(f"Row {row_number}: invalid label {value!r} (expected 1 or 2)")


class CorpusEncodingError(DataError):
    """Raised when input bytes are not valid UTF-8."""

    def __init__(self, offset: int, reason: str):
        self.offset = offset
        super().__init__(f"Invalid UTF-8 at byte {offset}: {reason}")


class DictionaryError(DataError):
    """Raised when a dictionary file cannot be parsed."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"Line {line_number}: {message}")


class DuplicateEntryError(DictionaryError):
    """Raised when a dictionary defines the same surface twice."""

    def __init__(self, line_number: int, surface: str):
        self.surface = surface
        super().__init__(line_number, f"duplicate entry {surface!r}")


class UnencodableCharacterError(DataError):
    """Raised when a character has no piece in the subword vocabulary."""

    def __init__(self, char: str, offset: int):
        self.char = char
        self.offset = offset
        super().__init__(
            f"Character {char!r} (U+{ord(char):04X}) at offset {offset} is not in the vocabulary"
        )


class ModelFormatError(DataError):
    """Raised when a serialized model file is malformed."""

    pass


class TrainingError(TokbenchError):
    """Raised when a trainer precondition is not met."""

    pass


class PipelineError(TokbenchError):
    """Raised when a pipeline stage fails."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"Stage '{stage}' failed: {cause}")


# Validation utilities
def validate_fraction(fraction: float) -> None:
    """
    Validate a sampling fraction.

    Args:
        fraction: Value that must lie in (0, 1]

    Raises:
        ValidationError: If fraction is out of range
    """
    if not 0.0 < fraction <= 1.0:
        raise ValidationError(f"fraction must be in (0, 1], got {fraction}")


def validate_input_path(path: Optional[str | Path], name: str) -> Path:
    """
    Validate that an input file exists.

    Args:
        path: Path to check
        name: Option name used in the error message

    Returns:
        Resolved Path object

    Raises:
        ConfigError: If path is missing or not a file
    """
    if path is None or str(path) == "":
        raise ConfigError(f"Missing required path: {name}")
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{name} not found: {path}")
    return p


def decode_utf8(data: bytes) -> str:
    """
    Decode bytes as strict UTF-8.

    Raises:
        CorpusEncodingError: If the bytes are not valid UTF-8
    """
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CorpusEncodingError(e.start, e.reason) from e


# Safe file operations
def safe_write_text(path: str | Path, content: str, encoding: str = "utf-8") -> Path:
    """
    Write text to a file, creating parent directories.

    Args:
        path: Target path
        content: Content to write
        encoding: File encoding

    Returns:
        Path written

    Raises:
        TokbenchError: If the file cannot be written
    """
    p = Path(path)
    try:
        p.parent.mkdir(parents=True, exist_ok=True)
        with open(p, "w", encoding=encoding, newline="") as f:
            f.write(content)
        return p
    except OSError as e:
        raise TokbenchError(f"Failed to write file {path}: {e}") from e


def safe_read_bytes(path: str | Path) -> bytes:
    """
    Read a whole file as bytes.

    Raises:
        ConfigError: If the file does not exist
    """
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"File not found: {path}")
    return p.read_bytes()


# Timing utilities
class Stopwatch:
    """Monotonic wall-clock timer."""

    def __init__(self) -> None:
        self.elapsed = 0.0

    @contextmanager
    def measure(self) -> Iterator["Stopwatch"]:
        start = time.perf_counter()
        try:
            yield self
        finally:
            self.elapsed += time.perf_counter() - start


# Format utilities
def format_seconds(seconds: float) -> str:
    """Format seconds with two decimals (decimal point, never comma)."""
    return f"{seconds:.2f}"


def format_bytes(bytes_size: int) -> str:
    """
    Format bytes to human-readable string.

    Args:
        bytes_size: Size in bytes

    Returns:
        Formatted string (e.g., "1.5 MB")
    """
    size_float: float = float(bytes_size)
    for unit in ["B", "KB", "MB", "GB", "TB"]:
        if abs(size_float) < 1024.0:
            return f"{size_float:.2f} {unit}"
        size_float /= 1024.0
    return f"{size_float:.2f} PB"


def format_float(value: float) -> str:
    """Format a float with 17 significant digits for bit-exact round trips."""
    return format(value, ".17g")


# TSV field escaping
_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def escape_field(value: str) -> str:
    """Escape backslash, tab, CR and LF so a value fits in one TSV field."""
    return "".join(_ESCAPES.get(char, char) for char in value)


def unescape_field(value: str) -> str:
    """Inverse of escape_field."""
    out = []
    chars = iter(value)
    for char in chars:
        if char == "\\":
            nxt = next(chars, "")
            out.append(_UNESCAPES.get(nxt, "\\" + nxt))
        else:
            out.append(char)
    return "".join(out)
