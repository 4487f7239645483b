from .graph import (
    Graph,
    add_self_loops,
    default_features,
    degree_vector,
    prepare_graph,
)
from .laplacian import (
    SparseLaplacian,
    block_diagonal,
    laplacian_power_apply,
    normalized_laplacian,
)

__all__ = [
    "Graph",
    "SparseLaplacian",
    "add_self_loops",
    "block_diagonal",
    "default_features",
    "degree_vector",
    "laplacian_power_apply",
    "normalized_laplacian",
    "prepare_graph",
]
