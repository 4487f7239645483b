from enum import Enum
from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class StopMetric(str, Enum):
    """Quantity monitored by early stopping."""

    LOSS = "loss"
    F1 = "f1"


class EvalProtocol(str, Enum):
    """Which split drives the scheduler and early stopping."""

    TEST_AS_VAL = "test_as_val"
    HELD_OUT_VAL = "held_out_val"


def lenet_branch_width(k: int, f: int) -> int:
    """Bin-axis length after conv(f) -> maxpool(2) -> conv(f)."""
    return (k - f + 1) // 2 - f + 1


class ModelConfig(BaseModel):
    """Architecture hyperparameters of a Graph-Hist network."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(25, description="number of histogram bins")
    h: int = Field(2, ge=0, description="largest Laplacian power")
    u: int = Field(64, ge=1, description="embedding width of each power branch")
    dropout: float = Field(0.8, ge=0.0, lt=1.0)
    num_classes: int = Field(2, ge=2)
    num_features: int = Field(2, ge=1)
    alpha: float = Field(20.0, gt=0.0, description="binning sharpness")
    normalize_histogram: bool = False

    filter_sizes: Tuple[int, ...] = (3, 4, 5, 6)
    conv1_channels: int = Field(64, ge=1)
    conv2_channels: int = Field(96, ge=1)
    span_channels: int = Field(96, ge=1)
    hidden_units: int = Field(256, ge=1)

    @field_validator("filter_sizes")
    @classmethod
    def check_filter_sizes(cls, v):
        if not v or any(f < 1 for f in v):
            raise ValueError(f"filter sizes must be positive, got {v}")
        return tuple(v)

    @model_validator(mode="after")
    def check_bins_fit_filters(self):
        if self.k < 7:
            raise ValueError(f"k must be at least 7, got {self.k}")
        for f in self.filter_sizes:
            if lenet_branch_width(self.k, f) < 1:
                raise ValueError(
                    f"k={self.k} is too small for filter size {f}: "
                    f"conv({f}) -> maxpool(2) -> conv({f}) leaves no output"
                )
        return self

    @property
    def channels(self) -> int:
        """Histogram channel count C = (h+1)*u."""
        return (self.h + 1) * self.u

    @property
    def flat_dim(self) -> int:
        """Width of the concatenated LeNet feature vector."""
        per_filter = sum(
            self.conv2_channels * lenet_branch_width(self.k, f)
            for f in self.filter_sizes
        )
        return per_filter + self.span_channels


class TrainConfig(BaseModel):
    """Optimisation and evaluation protocol."""

    model_config = ConfigDict(frozen=True)

    lr: float = Field(1e-4, gt=0.0)
    factor: float = 0.5
    patience: int = Field(2, ge=0)
    cooldown: int = Field(0, ge=0)
    lr_min: float = Field(1e-7, ge=0.0)
    batch_size: int = Field(32, ge=1)
    stop_patience: int = Field(9, ge=1)
    early_stopping: bool = True
    max_epochs: int = Field(100, ge=1)
    seed: int = 0
    oversample: bool = False
    stop_metric: StopMetric = StopMetric.LOSS
    eval_protocol: EvalProtocol = EvalProtocol.HELD_OUT_VAL
    val_fraction: float = Field(0.1, gt=0.0, lt=1.0)
    momentum: float = Field(0.0, ge=0.0, lt=1.0)
    weight_decay: float = Field(0.0, ge=0.0)
    positive_class: int = Field(1, ge=0)

    @field_validator("factor")
    @classmethod
    def check_factor(cls, v):
        if not 0.0 < v < 1.0:
            raise ValueError(f"factor must lie in (0, 1), got {v}")
        return v

    @model_validator(mode="after")
    def check_lr_floor(self):
        if self.lr_min > self.lr:
            raise ValueError(f"lr_min={self.lr_min} exceeds lr={self.lr}")
        return self


class DatasetPreset(BaseModel):
    """Per-dataset hyperparameters published with the architecture."""

    model_config = ConfigDict(frozen=True)

    k: int
    h: int
    u: int
    dropout: float
    oversample: bool = False
    stop_metric: StopMetric = StopMetric.LOSS


PRESETS: Dict[str, DatasetPreset] = {
    "IMDB-B": DatasetPreset(k=50, h=2, u=128, dropout=0.8),
    "IMDB-M": DatasetPreset(k=25, h=4, u=128, dropout=0.8),
    "COLLAB": DatasetPreset(k=25, h=2, u=256, dropout=0.2),
    "REDDIT-B": DatasetPreset(k=25, h=6, u=64, dropout=0.8),
    "REDDIT-5K": DatasetPreset(k=25, h=8, u=64, dropout=0.8),
    "REDDIT-12K": DatasetPreset(k=25, h=2, u=64, dropout=0.8),
    "BOTS": DatasetPreset(
        k=25, h=2, u=8, dropout=0.5, oversample=True, stop_metric=StopMetric.F1
    ),
}
