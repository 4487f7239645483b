from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from graphhist.exceptions import ShapeError

from .graph import Graph, degree_vector


@dataclass(frozen=True)
class SparseLaplacian:
    """Symmetric normalized Laplacian D^-1/2 (D - A) D^-1/2 in CSR form."""

    matrix: sp.csr_matrix

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def apply(self, x: np.ndarray) -> np.ndarray:
        if x.shape[0] != self.n:
            raise ShapeError(f"Laplacian is {self.n}x{self.n}, features have {x.shape[0]} rows")
        return np.asarray(self.matrix @ x)


def normalized_laplacian(g: Graph) -> SparseLaplacian:
    """
    Build the normalized Laplacian of a self-looped graph.

    Off-diagonal entries are -A_ij / sqrt(d_i d_j); the diagonal is
    1 - A_ii / d_i. The scale factor is formed as dinv[i] * dinv[j], which is
    commutative, so mirrored entries come out bit-identical.
    """
    if g.n == 0:
        raise ValueError("cannot build the Laplacian of an empty graph")
    degrees = degree_vector(g)
    if np.any(degrees <= 0):
        raise ValueError("every node needs positive degree; add self-loops first")
    dinv = 1.0 / np.sqrt(degrees)

    off = g.sources != g.targets
    rows, cols = g.sources[off], g.targets[off]
    values = -g.weights[off] * (dinv[rows] * dinv[cols])

    loop_weight = np.zeros(g.n, dtype=np.float64)
    loops = ~off
    loop_weight[g.sources[loops]] = g.weights[loops]
    diagonal = 1.0 - loop_weight / degrees

    nodes = np.arange(g.n, dtype=np.int64)
    matrix = sp.csr_matrix(
        (
            np.concatenate([values, diagonal]),
            (np.concatenate([rows, nodes]), np.concatenate([cols, nodes])),
        ),
        shape=(g.n, g.n),
    )
    matrix.sort_indices()
    return SparseLaplacian(matrix)


def laplacian_power_apply(
    laplacian: SparseLaplacian, x: np.ndarray, s: int
) -> np.ndarray:
    """Return L^s X by s successive sparse-dense products; s=0 returns X."""
    if s < 0:
        raise ValueError(f"power must be nonnegative, got {s}")
    if x.shape[0] != laplacian.n:
        raise ShapeError(
            f"Laplacian is {laplacian.n}x{laplacian.n}, features have {x.shape[0]} rows"
        )
    result = x
    for _ in range(s):
        result = laplacian.apply(result)
    return result


def block_diagonal(laplacians: Sequence[SparseLaplacian]) -> SparseLaplacian:
    """Laplacian of the disjoint union of the given graphs."""
    if len(laplacians) == 1:
        return laplacians[0]
    matrix = sp.block_diag([lap.matrix for lap in laplacians], format="csr")
    matrix.sort_indices()
    return SparseLaplacian(matrix)
