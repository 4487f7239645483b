"""
Checkpoints are ``.npz`` archives: one array per parameter (numpy records the
shape with each array) plus a JSON copy of the ModelConfig under
``__config__``.
"""

from __future__ import annotations

import json
import zipfile
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from pydantic import ValidationError

from graphhist.exceptions import CheckpointError
from graphhist.models import ModelConfig
from graphhist.utils.logger import get_logger

from .params import ModelParams

logger = get_logger(__name__)

CONFIG_KEY = "__config__"
FORMAT_KEY = "__format__"
FORMAT_VERSION = 1


def save_checkpoint(path: str | Path, config: ModelConfig, params: ModelParams) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {name: value for name, value in params.items()}
    arrays[CONFIG_KEY] = np.array(config.model_dump_json())
    arrays[FORMAT_KEY] = np.array(FORMAT_VERSION)
    with open(path, "wb") as f:
        np.savez(f, **arrays)
    logger.info(f"Saved checkpoint with {params.size()} parameters to {path}")
    return path


def config_differences(a: ModelConfig, b: ModelConfig) -> list[str]:
    left, right = a.model_dump(), b.model_dump()
    return [key for key in left if left[key] != right.get(key)]


def load_checkpoint(
    path: str | Path, expected: Optional[ModelConfig] = None
) -> Tuple[ModelConfig, ModelParams]:
    """
    Read a checkpoint and validate it.

    Raises:
        CheckpointError: the file is unreadable, its config is invalid, its
            tensors do not fit the config, or it disagrees with ``expected``.
    """
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        with np.load(path, allow_pickle=False) as archive:
            contents = {name: archive[name] for name in archive.files}
    except (OSError, ValueError, zipfile.BadZipFile) as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}")

    if CONFIG_KEY not in contents:
        raise CheckpointError(f"{path} has no embedded config")
    try:
        config = ModelConfig.model_validate(json.loads(str(contents.pop(CONFIG_KEY))))
    except (ValidationError, json.JSONDecodeError) as e:
        raise CheckpointError(f"{path} holds an invalid config: {e}")
    version = int(contents.pop(FORMAT_KEY, FORMAT_VERSION))
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path} has format {version}, expected {FORMAT_VERSION}")

    params = ModelParams({name: value.astype(np.float64) for name, value in contents.items()})
    problems = params.check_shapes(config)
    if problems:
        raise CheckpointError(f"{path} tensors do not match its config: {problems[:5]}")
    if expected is not None:
        differences = config_differences(config, expected)
        if differences:
            raise CheckpointError(
                f"{path} was trained with a different config ({', '.join(differences)})"
            )
    return config, params
