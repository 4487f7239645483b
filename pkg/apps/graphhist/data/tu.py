"""
Reader and writer for the line-oriented TU graph-classification format.

A dataset ``NAME`` in a directory consists of

* ``NAME_A.txt``: one edge per line, ``i, j`` with 1-based global node ids
* ``NAME_graph_indicator.txt``: line t holds the 1-based graph id of node t
* ``NAME_graph_labels.txt``: line g holds the integer label of graph g

and optionally ``NAME_node_labels.txt`` / ``NAME_node_attributes.txt``.
"""

from __future__ import annotations

from collections import defaultdict
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from graphhist.exceptions import DatasetFormatError
from graphhist.graph import Graph, prepare_graph
from graphhist.utils.logger import get_logger

from .dataset import GraphDataset

logger = get_logger(__name__)


class NodeFeatureSource(str, Enum):
    """Where node features come from when loading a TU directory."""

    DEFAULT = "default"
    NODE_LABELS = "node_labels"
    NODE_ATTRIBUTES = "node_attributes"


def _tu_path(directory: Path, name: str, suffix: str) -> Path:
    return directory / f"{name}_{suffix}.txt"


def _read_lines(path: Path) -> List[Tuple[int, str]]:
    """Return (1-based line number, stripped text) pairs; trailing blanks dropped."""
    if not path.is_file():
        raise DatasetFormatError(path, "missing file")
    with open(path, "r", encoding="utf-8") as f:
        lines = [(number, text.strip()) for number, text in enumerate(f, start=1)]
    while lines and not lines[-1][1]:
        lines.pop()
    for number, text in lines:
        if not text:
            raise DatasetFormatError(path, "blank line", number)
    return lines


def _parse_int(token: str, path: Path, line: int) -> int:
    try:
        return int(token.strip())
    except ValueError:
        raise DatasetFormatError(path, f"expected an integer, got {token.strip()!r}", line)


def _parse_float(token: str, path: Path, line: int) -> float:
    try:
        return float(token.strip())
    except ValueError:
        raise DatasetFormatError(path, f"expected a number, got {token.strip()!r}", line)


def _read_node_labels(path: Path, num_nodes: int) -> np.ndarray:
    lines = _read_lines(path)
    if len(lines) != num_nodes:
        raise DatasetFormatError(path, f"expected {num_nodes} lines, found {len(lines)}")
    raw = [_parse_int(text.split(",")[0], path, number) for number, text in lines]
    values = sorted(set(raw))
    index = {value: i for i, value in enumerate(values)}
    one_hot = np.zeros((num_nodes, len(values)), dtype=np.float64)
    one_hot[np.arange(num_nodes), [index[value] for value in raw]] = 1.0
    return one_hot


def _read_node_attributes(path: Path, num_nodes: int) -> np.ndarray:
    lines = _read_lines(path)
    if len(lines) != num_nodes:
        raise DatasetFormatError(path, f"expected {num_nodes} lines, found {len(lines)}")
    rows = []
    for number, text in lines:
        row = [_parse_float(token, path, number) for token in text.split(",")]
        if rows and len(row) != len(rows[0]):
            raise DatasetFormatError(
                path, f"expected {len(rows[0])} attributes, found {len(row)}", number
            )
        rows.append(row)
    return np.array(rows, dtype=np.float64)


def load_tu_dataset(
    directory: str | Path,
    name: str,
    node_features: NodeFeatureSource = NodeFeatureSource.DEFAULT,
) -> GraphDataset:
    """
    Load a TU dataset directory.

    Node ids become 0-based per graph, raw graph labels are remapped to
    0..m-1 in ascending order of their value, self-loops are inserted and
    default (degree, 1) features attached unless ``node_features`` selects a
    feature file.

    Raises:
        DatasetFormatError: a required file is missing, a token is not an
            integer, or an edge references a node outside any graph.
    """
    directory = Path(directory)
    indicator_path = _tu_path(directory, name, "graph_indicator")
    labels_path = _tu_path(directory, name, "graph_labels")
    edges_path = _tu_path(directory, name, "A")

    # Read the files first so a missing one is reported before any parsing
    indicator_lines = _read_lines(indicator_path)
    label_lines = _read_lines(labels_path)
    edge_lines = _read_lines(edges_path)

    node_graph = [
        _parse_int(text, indicator_path, number) for number, text in indicator_lines
    ]
    num_graphs = len(label_lines)
    members: Dict[int, List[int]] = defaultdict(list)
    local_index = np.empty(len(node_graph), dtype=np.int64)
    for node, (graph_id, (number, _)) in enumerate(zip(node_graph, indicator_lines)):
        if not 1 <= graph_id <= num_graphs:
            raise DatasetFormatError(
                indicator_path,
                f"graph id {graph_id} outside 1..{num_graphs} (graph_labels has "
                f"{num_graphs} lines)",
                number,
            )
        local_index[node] = len(members[graph_id])
        members[graph_id].append(node)
    empty = [g for g in range(1, num_graphs + 1) if g not in members]
    if empty:
        raise DatasetFormatError(indicator_path, f"graphs without nodes: {empty[:10]}")

    edges: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
    for number, text in edge_lines:
        tokens = text.split(",")
        if len(tokens) != 2:
            raise DatasetFormatError(edges_path, f"expected 'i, j', got {text!r}", number)
        i, j = (_parse_int(token, edges_path, number) for token in tokens)
        for node in (i, j):
            if not 1 <= node <= len(node_graph):
                raise DatasetFormatError(
                    edges_path, f"node {node} is not assigned to any graph", number
                )
        graph_i, graph_j = node_graph[i - 1], node_graph[j - 1]
        if graph_i != graph_j:
            raise DatasetFormatError(
                edges_path,
                f"edge ({i}, {j}) joins graph {graph_i} and graph {graph_j}",
                number,
            )
        edges[graph_i].append((int(local_index[i - 1]), int(local_index[j - 1])))

    raw_labels = [_parse_int(text, labels_path, number) for number, text in label_lines]
    label_values = sorted(set(raw_labels))
    label_index = {value: i for i, value in enumerate(label_values)}

    features: Optional[np.ndarray] = None
    if node_features is NodeFeatureSource.NODE_LABELS:
        features = _read_node_labels(
            _tu_path(directory, name, "node_labels"), len(node_graph)
        )
    elif node_features is NodeFeatureSource.NODE_ATTRIBUTES:
        features = _read_node_attributes(
            _tu_path(directory, name, "node_attributes"), len(node_graph)
        )

    graphs = []
    for graph_id in range(1, num_graphs + 1):
        nodes = members[graph_id]
        graph = Graph.from_edges(
            len(nodes),
            edges[graph_id],
            None if features is None else features[nodes],
        )
        graphs.append(prepare_graph(graph))

    dataset = GraphDataset(
        graphs=graphs,
        labels=np.array([label_index[value] for value in raw_labels]),
        num_classes=len(label_values),
        name=name,
        label_values=label_values,
    )
    logger.info(
        f"Loaded {name}: {len(graphs)} graphs, {dataset.num_classes} classes, "
        f"{len(node_graph)} nodes"
    )
    return dataset


def write_tu_dataset(ds: GraphDataset, directory: str | Path, name: str) -> Path:
    """
    Write a dataset in TU format.

    Each undirected edge is written in both directions; self-loops are left out
    because the loader inserts them. Labels are written as their raw values.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    offset = 0
    with open(_tu_path(directory, name, "A"), "w", encoding="utf-8") as edge_file, open(
        _tu_path(directory, name, "graph_indicator"), "w", encoding="utf-8"
    ) as indicator_file:
        for graph_id, graph in enumerate(ds.graphs, start=1):
            for i, j in zip(graph.sources, graph.targets):
                if i != j:
                    edge_file.write(f"{offset + i + 1}, {offset + j + 1}\n")
            indicator_file.write(f"{graph_id}\n" * graph.n)
            offset += graph.n

    with open(_tu_path(directory, name, "graph_labels"), "w", encoding="utf-8") as f:
        for label in ds.labels:
            f.write(f"{ds.label_values[label]}\n")

    logger.info(f"Wrote {len(ds)} graphs of {name} to {directory}")
    return directory
