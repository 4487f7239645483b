from typing import List, Optional

from pydantic import BaseModel, Field

from .config import ModelConfig, TrainConfig


class Metrics(BaseModel):
    """Classification metrics of one evaluation."""

    accuracy: float = Field(ge=0.0, le=1.0)
    precision: float = Field(ge=0.0, le=1.0)
    recall: float = Field(ge=0.0, le=1.0)
    f1: float = Field(ge=0.0, le=1.0)
    positive_class: int = 1
    confusion_matrix: List[List[int]]


class EpochRecord(BaseModel):
    """One line of the training history log."""

    epoch: int
    lr: float
    train_loss: float
    eval_loss: float
    eval_accuracy: float
    eval_f1: Optional[float] = None


class FoldSummary(BaseModel):
    """Per-fold row of a cross-validation report."""

    fold: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    best_epoch: int
    epochs: int


class RunConfig(BaseModel):
    """Configuration snapshot stored alongside results."""

    model: ModelConfig
    train: TrainConfig


class CrossValidationSummary(BaseModel):
    """Structured JSON report of a k-fold run."""

    dataset: str
    config: RunConfig
    folds: List[FoldSummary]
    mean_accuracy: float
    std_accuracy: float

    def formatted(self) -> str:
        """Accuracy as a percentage, "mean ± std"."""
        return f"{100 * self.mean_accuracy:.1f} ± {100 * self.std_accuracy:.1f}"


class DatasetStats(BaseModel):
    """Size summary of a graph collection."""

    name: str
    graphs: int
    classes: int
    mean_nodes: float
    mean_edges: float
    class_counts: List[int]
