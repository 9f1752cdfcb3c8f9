"""Helper utilities for common command-line patterns."""

import logging
import sys
from typing import Iterable, Optional, Sequence, TextIO

from pydantic import ValidationError

from debias.core.exceptions import (
    DebiasError,
    ExperimentError,
    ManifestError,
    UsageError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

def parse_int_list(text: str, field_name: str = "list") -> list[int]:
    """
    Parse a comma-separated list of positive integers.

    Raises:
        UsageError: If an entry is not a positive integer or the list is empty
    """
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"Invalid integer in {field_name}: {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise UsageError(f"{field_name} must be a non-empty list of positive integers")
    return values

def format_table(headers: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """Left-aligned plain-text table."""
    rendered = [[str(cell) for cell in row] for row in rows]
    widths = [len(h) for h in headers]
    for row in rendered:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in rendered)
    return "\n".join(lines)


def exit_status_for(exc: BaseException, stream: Optional[TextIO] = None) -> int:
    """
    Report an exception on ``stream`` (standard error by default) and map it to an exit status.

    Usage problems exit with 2, everything else with 1.
    """
    stream = stream or sys.stderr
    if isinstance(exc, (UsageError, ManifestError)):
        print(f"usage error: {exc}", file=stream)
        return EXIT_USAGE
    if isinstance(exc, ExperimentError):
        print(f"failed configuration {exc.config_id}: {exc}", file=stream)
        return EXIT_FAILURE
    if isinstance(exc, (DebiasError, ValidationError, ValueError)):
        print(f"error: {exc}", file=stream)
        return EXIT_FAILURE
    logger.exception("Unexpected failure")
    print(f"unexpected error: {exc}", file=stream)
    return EXIT_FAILURE
