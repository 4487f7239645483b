import logging
import os
from pathlib import Path

from graphhist.config import settings


class TruncatedPathFormatter(logging.Formatter):
    """Show timestamp, the last two path components, file name and line number."""

    workspace_root = Path(__file__).parent.parent.parent

    def format(self, record):
        try:
            caller_path = Path(record.pathname)
            relative_path = caller_path.relative_to(self.workspace_root)
            path_parts = relative_path.parts
            if len(path_parts) > 2:
                truncated_path = os.path.join(*path_parts[-2:])
            else:
                truncated_path = str(relative_path)
            record.truncated_path = truncated_path
            record.filename = Path(record.pathname).stem
            super().format(record)
            return (
                f"[{record.asctime}] [{record.levelname}] [{record.truncated_path}] "
                f"[{record.filename}:{record.lineno}] {record.getMessage()}"
            )
        except Exception:
            # Fallback to basic format if path processing fails
            super().format(record)
            return f"[{record.asctime}] [{record.levelname}] {record.getMessage()}"


def get_logger(name: str) -> logging.Logger:
    """
    Create a logger with custom formatting that shows:
    - Timestamp and level
    - Truncated path
    - Filename (without extension) and line number
    """
    logger = logging.getLogger(name)

    # Prevent propagation to root logger to avoid double logging
    logger.propagate = False

    if not logger.handlers:
        level = logging.getLevelName(settings.LOG_LEVEL)
        if not isinstance(level, int):
            level = logging.INFO
        logger.setLevel(level)

        console_handler = logging.StreamHandler()
        console_handler.setLevel(level)
        console_handler.setFormatter(
            TruncatedPathFormatter(fmt="%(asctime)s", datefmt="%Y-%m-%d %H:%M:%S")
        )
        logger.addHandler(console_handler)

    return logger


def set_level(level: str) -> None:
    """Change the level of every graphhist logger created so far."""
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level: {level}")
    for name, logger in logging.root.manager.loggerDict.items():
        if name.startswith("graphhist") and isinstance(logger, logging.Logger):
            logger.setLevel(numeric)
            for handler in logger.handlers:
                handler.setLevel(numeric)
