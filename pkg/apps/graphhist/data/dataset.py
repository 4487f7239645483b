from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from graphhist.graph import Graph
from graphhist.models import DatasetStats


@dataclass(frozen=True)
class GraphDataset:
    """
    Labelled graph collection.

    Labels are dense class indices in [0, num_classes); ``label_values`` maps a
    class index back to the raw label found on disk.
    """

    graphs: List[Graph]
    labels: np.ndarray
    num_classes: int
    name: str
    label_values: Optional[List[int]] = field(default=None)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        if len(labels) != len(self.graphs):
            raise ValueError(
                f"{len(self.graphs)} graphs but {len(labels)} labels in {self.name}"
            )
        if len(labels) and (labels.min() < 0 or labels.max() >= self.num_classes):
            raise ValueError(f"labels must lie in [0, {self.num_classes})")
        missing = set(range(self.num_classes)) - set(labels.tolist())
        if missing:
            raise ValueError(f"classes {sorted(missing)} have no graphs in {self.name}")
        if self.label_values is None:
            object.__setattr__(self, "label_values", list(range(self.num_classes)))

    def __len__(self) -> int:
        return len(self.graphs)

    @property
    def num_features(self) -> int:
        features = self.graphs[0].features
        return 2 if features is None else features.shape[1]

    def subset(self, indices: Sequence[int]) -> List[Graph]:
        return [self.graphs[i] for i in indices]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_classes)


def dataset_stats(ds: GraphDataset) -> DatasetStats:
    """Graph count, class count and mean node/edge counts of a dataset."""
    return DatasetStats(
        name=ds.name,
        graphs=len(ds),
        classes=ds.num_classes,
        mean_nodes=float(np.mean([g.n for g in ds.graphs])),
        mean_edges=float(np.mean([g.num_undirected_edges for g in ds.graphs])),
        class_counts=ds.class_counts().tolist(),
    )
