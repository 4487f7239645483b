from pathlib import Path
from typing import Optional


class GraphHistError(Exception):
    """Base class for errors raised by graphhist."""


class ShapeError(GraphHistError, ValueError):
    """Operand shapes are inconsistent."""


class BinRangeError(GraphHistError, ValueError):
    """Histogram input lies outside [-1, 1]."""


class CheckpointError(GraphHistError):
    """Checkpoint is unreadable or does not match the expected config."""


class DatasetFormatError(GraphHistError):
    """
    A dataset file is missing or malformed.

    The message is rendered as ``path:line: message`` so the offending line can
    be opened directly from the terminal.
    """

    def __init__(self, path: str | Path, message: str, line: Optional[int] = None):
        self.path = str(path)
        self.line = line
        self.reason = message
        location = self.path if line is None else f"{self.path}:{line}"
        super().__init__(f"{location}: {message}")
