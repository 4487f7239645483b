from .batching import Batch, make_batch
from .dataset import GraphDataset, dataset_stats
from .folds import FoldPlan, oversample, split_folds, split_validation
from .synth import SynthKind, synth_dataset
from .tu import NodeFeatureSource, load_tu_dataset, write_tu_dataset

__all__ = [
    "Batch",
    "FoldPlan",
    "GraphDataset",
    "NodeFeatureSource",
    "SynthKind",
    "dataset_stats",
    "load_tu_dataset",
    "make_batch",
    "oversample",
    "split_folds",
    "split_validation",
    "synth_dataset",
    "write_tu_dataset",
]
