from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from .metrics import RunConfig


class RunCommand(str, Enum):
    """Commands that write a run manifest."""

    TRAIN = "train"
    CV = "cv"


class RunManifest(BaseModel):
    """Everything needed to replay a run."""

    command: RunCommand
    config: RunConfig
    seed: int
    dataset_path: str
    dataset_name: str
    output_dir: str
    code_version: str
    options: Dict[str, Any] = Field(default_factory=dict)
    created_at: datetime = Field(default_factory=datetime.now)


class GradCheckEntry(BaseModel):
    """Result of checking one kernel (or the binning oracle)."""

    kernel: str
    cases: int
    max_rel_error: float
    tolerance: float
    passed: bool


class GradCheckReport(BaseModel):
    """Outcome of the full gradient-check suite."""

    entries: List[GradCheckEntry]
    injected_fault: Optional[str] = None

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.entries)

    def failures(self) -> List[str]:
        return [entry.kernel for entry in self.entries if not entry.passed]
