"""Exception hierarchy for debias-lab.

Most errors are also ``ValueError`` so callers that only care about bad input
can catch the builtin.
"""

from pathlib import Path
from typing import Iterable, Optional


class DebiasError(Exception):
    """Base class for every error raised by the laboratory."""


class ConfigurationError(DebiasError, ValueError):
    """Invalid algorithm or experiment configuration."""


class EmptyRangeError(DebiasError, ValueError):
    """Integer draw requested from an empty range."""


class DomainError(DebiasError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class InsufficientDataError(DebiasError, ValueError):
    """Too few observations for a statistic."""


class IncompleteGridError(DebiasError, ValueError):
    """An F-CR grid is missing one or more cells."""

    def __init__(self, missing: Iterable[tuple[float, float]], what: str = "grid"):
        self.missing = sorted(missing)
        cells = ", ".join(f"(F={f:g}, CR={cr:g})" for f, cr in self.missing)
        super().__init__(f"Incomplete {what}: missing cells {cells}")


class ManifestError(DebiasError, ValueError):
    """Manifest file unreadable or invalid."""

    def __init__(self, path: Optional[Path], detail: str):
        self.path = path
        super().__init__(f"{path}: {detail}" if path else detail)


class PersistenceError(DebiasError):
    """Reading or writing batch output failed."""

    def __init__(self, path: Path, detail: str):
        self.path = path
        super().__init__(f"{path}: {detail}")


class ExperimentError(DebiasError):
    """A configuration failed while running."""

    def __init__(self, config_id: str, detail: str):
        self.config_id = config_id
        super().__init__(f"{config_id}: {detail}")


class UsageError(DebiasError):
    """Bad command-line usage: unknown kind, missing path, malformed list."""
