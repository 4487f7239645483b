from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from graphhist.graph import (
    Graph,
    SparseLaplacian,
    block_diagonal,
    default_features,
    normalized_laplacian,
)


@dataclass(frozen=True)
class Batch:
    """
    Disjoint union of several graphs.

    ``boundaries`` has one more entry than there are graphs; graph g owns the
    node rows ``boundaries[g]:boundaries[g + 1]``.
    """

    laplacian: SparseLaplacian
    features: np.ndarray
    boundaries: np.ndarray
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def num_nodes(self) -> int:
        return int(self.boundaries[-1])

    def node_range(self, g: int) -> slice:
        return slice(int(self.boundaries[g]), int(self.boundaries[g + 1]))


def make_batch(
    graphs: Sequence[Graph],
    labels: Sequence[int],
    laplacians: Optional[Sequence[SparseLaplacian]] = None,
) -> Batch:
    """
    Assemble graphs into one block-diagonal batch.

    ``laplacians`` may carry precomputed per-graph Laplacians (the trainer
    caches them); otherwise they are built here.
    """
    if not graphs:
        raise ValueError("cannot batch an empty list of graphs")
    if len(graphs) != len(labels):
        raise ValueError(f"{len(graphs)} graphs but {len(labels)} labels")
    if laplacians is None:
        laplacians = [normalized_laplacian(g) for g in graphs]
    features = [g.features if g.features is not None else default_features(g) for g in graphs]
    boundaries = np.concatenate([[0], np.cumsum([g.n for g in graphs])]).astype(np.int64)
    return Batch(
        laplacian=block_diagonal(laplacians),
        features=np.vstack(features),
        boundaries=boundaries,
        labels=np.asarray(labels, dtype=np.int64),
    )
