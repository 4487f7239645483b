import csv
import json
import os
import uuid
from datetime import datetime
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Sequence

from pydantic import BaseModel

from graphhist.config import settings


def secure_name(name: str) -> str:
    """
    Return a version of a name that is safe to use as a file or directory name.
    """
    # Get base name in case full path was provided
    name = os.path.basename(name.rstrip("/\\"))

    # Replace spaces with underscores and remove other problematic characters
    name = "".join(c for c in name if c.isalnum() or c in "._- ")
    name = name.replace(" ", "_")

    if not name:
        name = f"run_{uuid.uuid4().hex[:8]}"

    return name


def create_run_directory(
    command: str, dataset_name: str, out_dir: Optional[str | Path] = None
) -> Path:
    """
    Create a fresh directory for the artifacts of one run.

    Args:
        command: CLI command that owns the run (train, cv, eval, ...)
        dataset_name: Name of the dataset the run uses
        out_dir: Explicit directory; when omitted a timestamped directory is
            created under settings.OUTPUT_DIR

    Returns:
        Absolute path of the run directory
    """
    if out_dir is None:
        stamp = datetime.now().strftime("%Y%m%d-%H%M%S")
        out_dir = os.path.join(
            settings.OUTPUT_DIR,
            f"{secure_name(command)}_{secure_name(dataset_name)}_{stamp}",
        )
    path = Path(out_dir).resolve()
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_json(path: str | Path, payload: BaseModel | Mapping[str, Any]) -> Path:
    """Write a pydantic model or a plain mapping as indented JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def write_csv(
    path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]
) -> Path:
    """Write rows as comma-separated values with a header line."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    return path


def resolve_dataset_directory(path: str | Path) -> Path:
    """
    Locate a dataset directory.

    A relative path that does not exist from the working directory is looked
    up under settings.DATA_DIR. Paths that exist nowhere are returned as given
    so the reader can report the missing file.
    """
    path = Path(path)
    if path.is_absolute() or path.exists():
        return path
    candidate = Path(settings.DATA_DIR) / path
    return candidate if candidate.is_dir() else path
