from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from graphhist.exceptions import ShapeError

Edge = Tuple[int, int, float]


@dataclass(frozen=True)
class Graph:
    """
    Undirected weighted graph stored as a symmetric edge list.

    Every entry (i, j, w) has a mirror (j, i, w); a self-loop is stored once.
    Arrays are made read-only on construction so graphs can be shared freely.
    """

    n: int
    sources: np.ndarray
    targets: np.ndarray
    weights: np.ndarray
    features: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"node count must be nonnegative, got {self.n}")
        if not (len(self.sources) == len(self.targets) == len(self.weights)):
            raise ShapeError("sources, targets and weights differ in length")
        if len(self.sources) and (
            min(self.sources.min(), self.targets.min()) < 0
            or max(self.sources.max(), self.targets.max()) >= self.n
        ):
            raise ValueError(f"edge endpoint outside [0, {self.n})")
        if len(self.sources):
            a = self.adjacency()
            if (a != a.T).nnz:
                raise ValueError(
                    "edge list is not symmetric: some (i, j, w) lack (j, i, w)"
                )
        if self.features is not None and self.features.shape[0] != self.n:
            raise ShapeError(
                f"features have {self.features.shape[0]} rows for {self.n} nodes"
            )
        for array in (self.sources, self.targets, self.weights, self.features):
            if array is not None:
                array.setflags(write=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Edge] | Iterable[Tuple[int, int]],
        features: Optional[np.ndarray] = None,
    ) -> "Graph":
        """
        Build a graph from (i, j) or (i, j, w) tuples, symmetrising as it goes.

        A pair listed more than once (in either direction) keeps the weight of
        its last occurrence.
        """
        entries = {}
        for edge in edges:
            i, j = int(edge[0]), int(edge[1])
            w = float(edge[2]) if len(edge) > 2 else 1.0
            entries[(i, j)] = w
            entries[(j, i)] = w
        keys = sorted(entries)
        sources = np.array([i for i, _ in keys], dtype=np.int64)
        targets = np.array([j for _, j in keys], dtype=np.int64)
        weights = np.array([entries[key] for key in keys], dtype=np.float64)
        if features is not None:
            features = np.array(features, dtype=np.float64)
        return cls(n, sources, targets, weights, features)

    @property
    def edges(self) -> List[Edge]:
        return [
            (int(i), int(j), float(w))
            for i, j, w in zip(self.sources, self.targets, self.weights)
        ]

    @property
    def num_undirected_edges(self) -> int:
        """Edge count with each undirected pair counted once, self-loops excluded."""
        return int(np.count_nonzero(self.sources < self.targets))

    def has_self_loops(self) -> bool:
        loops = self.sources[self.sources == self.targets]
        return len(np.unique(loops)) == self.n

    def adjacency(self) -> sp.csr_matrix:
        """Weighted adjacency matrix A as CSR."""
        return sp.csr_matrix(
            (self.weights, (self.sources, self.targets)), shape=(self.n, self.n)
        )

    def with_features(self, features: Optional[np.ndarray]) -> "Graph":
        if features is not None:
            features = np.array(features, dtype=np.float64)
        return Graph(self.n, self.sources, self.targets, self.weights, features)


def add_self_loops(g: Graph) -> Graph:
    """Return a copy of g where every node has a self-loop of weight 1."""
    off_diagonal = g.sources != g.targets
    loops = np.arange(g.n, dtype=np.int64)
    return Graph(
        g.n,
        np.concatenate([g.sources[off_diagonal], loops]),
        np.concatenate([g.targets[off_diagonal], loops]),
        np.concatenate([g.weights[off_diagonal], np.ones(g.n)]),
        g.features,
    )


def degree_vector(g: Graph) -> np.ndarray:
    """Weighted degrees d_i = sum_j A_ij, self-loop included."""
    degrees = np.zeros(g.n, dtype=np.float64)
    np.add.at(degrees, g.sources, g.weights)
    return degrees


def default_features(g: Graph) -> np.ndarray:
    """n x 2 matrix of (degree, 1) used when a graph carries no node features."""
    return np.column_stack([degree_vector(g), np.ones(g.n, dtype=np.float64)])


def prepare_graph(g: Graph) -> Graph:
    """Insert self-loops and attach default features unless features exist."""
    g = add_self_loops(g)
    if g.features is None:
        g = g.with_features(default_features(g))
    return g
