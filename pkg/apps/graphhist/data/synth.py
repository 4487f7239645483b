from __future__ import annotations

from enum import Enum
from typing import Tuple

import networkx as nx
import numpy as np

from graphhist.graph import Graph, prepare_graph
from graphhist.utils.logger import get_logger

from .dataset import GraphDataset

logger = get_logger(__name__)


class SynthKind(str, Enum):
    """Synthetic two-class graph families."""

    STARS_VS_CYCLES = "stars_vs_cycles"
    ER_DENSITY_PAIR = "er_density_pair"


def _from_networkx(graph: nx.Graph) -> Graph:
    return prepare_graph(Graph.from_edges(graph.number_of_nodes(), graph.edges()))


def synth_dataset(
    kind: SynthKind | str,
    count: int,
    size_range: Tuple[int, int],
    seed: int,
    densities: Tuple[float, float] = (0.1, 0.3),
) -> GraphDataset:
    """
    Generate a seeded two-class dataset.

    Graph i gets class i % 2, so classes alternate and their counts differ by at
    most one. ``stars_vs_cycles`` emits star graphs (class 0) and cycles
    (class 1); ``er_density_pair`` emits Erdős–Rényi graphs with edge
    probability ``densities[label]``.
    """
    kind = SynthKind(kind)
    low, high = size_range
    if low < 3:
        raise ValueError(f"size range must start at 3 nodes or more, got {low}")
    if high < low:
        raise ValueError(f"empty size range {size_range}")
    if count < 2:
        raise ValueError(f"need at least 2 graphs for two classes, got {count}")

    rng = np.random.default_rng(seed)
    graphs = []
    labels = []
    for i in range(count):
        label = i % 2
        n = int(rng.integers(low, high + 1))
        if kind is SynthKind.STARS_VS_CYCLES:
            graph = nx.star_graph(n - 1) if label == 0 else nx.cycle_graph(n)
        else:
            graph = nx.gnp_random_graph(
                n, densities[label], seed=int(rng.integers(2**31 - 1))
            )
        graphs.append(_from_networkx(graph))
        labels.append(label)

    logger.debug(f"Generated {count} {kind.value} graphs with seed {seed}")
    return GraphDataset(
        graphs=graphs,
        labels=np.array(labels),
        num_classes=2,
        name=kind.value,
        label_values=[0, 1],
    )
