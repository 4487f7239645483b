from .config import (
    PRESETS,
    DatasetPreset,
    EvalProtocol,
    ModelConfig,
    StopMetric,
    TrainConfig,
    lenet_branch_width,
)
from .metrics import (
    CrossValidationSummary,
    DatasetStats,
    EpochRecord,
    FoldSummary,
    Metrics,
    RunConfig,
)
from .run import GradCheckEntry, GradCheckReport, RunCommand, RunManifest

__all__ = [
    "PRESETS",
    "CrossValidationSummary",
    "DatasetPreset",
    "DatasetStats",
    "EpochRecord",
    "EvalProtocol",
    "FoldSummary",
    "GradCheckEntry",
    "GradCheckReport",
    "Metrics",
    "ModelConfig",
    "RunCommand",
    "RunConfig",
    "RunManifest",
    "StopMetric",
    "TrainConfig",
    "lenet_branch_width",
]
