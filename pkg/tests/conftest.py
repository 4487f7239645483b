from pathlib import Path
from typing import Iterable, Optional

import numpy as np
import pytest

from graphhist.data import GraphDataset, synth_dataset
from graphhist.graph import Graph, prepare_graph
from graphhist.models import ModelConfig, TrainConfig


def write_tu(
    directory: Path,
    name: str,
    edges: str,
    indicator: str,
    labels: str,
    node_labels: Optional[str] = None,
    node_attributes: Optional[str] = None,
) -> Path:
    """Write raw TU file contents into ``directory``."""
    directory.mkdir(parents=True, exist_ok=True)
    (directory / f"{name}_A.txt").write_text(edges)
    (directory / f"{name}_graph_indicator.txt").write_text(indicator)
    (directory / f"{name}_graph_labels.txt").write_text(labels)
    if node_labels is not None:
        (directory / f"{name}_node_labels.txt").write_text(node_labels)
    if node_attributes is not None:
        (directory / f"{name}_node_attributes.txt").write_text(node_attributes)
    return directory


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def random_graph(rng: np.random.Generator, n: int, p: float = 0.4) -> Graph:
    """Self-looped random graph with random positive weights."""
    edges = [
        (i, j, float(rng.uniform(0.5, 2.0)))
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p
    ]
    return prepare_graph(Graph.from_edges(n, edges))


def edge_multiset(g: Graph) -> Iterable:
    return sorted(g.edges)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def two_node_graph():
    """Nodes 0 and 1 joined by one unit edge, self-loops inserted."""
    return prepare_graph(Graph.from_edges(2, [(0, 1, 1.0)]))


@pytest.fixture
def tiny_config():
    """Smallest head that still runs every filter branch (k=17 fits filter 6)."""
    return ModelConfig(
        k=17,
        h=1,
        u=3,
        dropout=0.5,
        num_classes=2,
        num_features=2,
        conv1_channels=3,
        conv2_channels=4,
        span_channels=2,
        hidden_units=5,
    )


@pytest.fixture
def tiny_train_config():
    return TrainConfig(lr=0.01, batch_size=4, max_epochs=3, seed=0)


@pytest.fixture
def small_dataset() -> GraphDataset:
    return synth_dataset("stars_vs_cycles", 16, (4, 8), seed=1)
