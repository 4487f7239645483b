"""
Multi-channel histogram binning of node embeddings.

The forward pass counts, per embedding dimension, how many nodes fall into
each of k evenly spaced bins over [-1, 1]. Counting is piecewise constant, so
the backward pass is a surrogate: each node receives the bin gradients of its
channel averaged with weights exp(-alpha * |center - value|), signed by the
direction of the bin center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from graphhist.exceptions import BinRangeError, ShapeError

from .tape import Kernel, Var

RANGE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BinLayout:
    """k non-overlapping bins of equal width covering [-1, 1] exactly."""

    k: int
    centers: np.ndarray
    width: float
    edges: np.ndarray


def bin_centers(k: int) -> BinLayout:
    if k < 2:
        raise ValueError(f"need at least 2 bins, got {k}")
    width = 2.0 / k
    centers = -1.0 + width * (np.arange(k) + 0.5)
    edges = -1.0 + width * np.arange(k + 1)
    edges[-1] = 1.0
    for array in (centers, edges):
        array.setflags(write=False)
    return BinLayout(k=k, centers=centers, width=width, edges=edges)


def _check_range(c2: np.ndarray) -> None:
    if not c2.size:
        return
    if not np.all(np.isfinite(c2)):
        raise BinRangeError("histogram input contains NaN or infinite values")
    if c2.min() < -1.0 - RANGE_TOLERANCE or c2.max() > 1.0 + RANGE_TOLERANCE:
        raise BinRangeError(
            f"histogram input must lie in [-1, 1], got [{c2.min()}, {c2.max()}]"
        )


def bin_index(c2: np.ndarray, layout: BinLayout) -> np.ndarray:
    """
    Bin of every entry: intervals are [lo, hi) except the last, which also
    takes +1.
    """
    index = np.searchsorted(layout.edges, c2, side="right") - 1
    return np.clip(index, 0, layout.k - 1)


def histogram_forward(c2: np.ndarray, layout: BinLayout) -> np.ndarray:
    """Count nodes per bin and channel; returns a k x C matrix of floats."""
    if c2.ndim != 2:
        raise ShapeError(f"histogram input must be n x C, got {c2.shape}")
    _check_range(c2)
    n, channels = c2.shape
    index = bin_index(c2, layout)
    flat = (index + layout.k * np.arange(channels)[None, :]).ravel()
    counts = np.bincount(flat, minlength=layout.k * channels)
    return counts.reshape(channels, layout.k).T.astype(np.float64)


def histogram_backward(
    c2: np.ndarray, grad_h: np.ndarray, layout: BinLayout, alpha: float = 20.0
) -> np.ndarray:
    """
    Surrogate gradient of the counts with respect to the node values.

    For node l and channel j, with d_i = center_i - c2[l, j]:
    sum_i w_i sign(d_i) grad_h[i, j] / sum_i w_i, where w_i = exp(-alpha |d_i|)
    and sign(0) = 0. Weights are rescaled by the distance to the nearest
    center, which cancels in the ratio. Memory stays O(n C + k C): the
    k x n x C distance tensor is consumed one bin at a time.
    """
    if c2.ndim != 2 or grad_h.shape != (layout.k, c2.shape[1]):
        raise ShapeError(
            f"gradient {grad_h.shape} does not match {layout.k} bins x {c2.shape[1]} channels"
        )
    nearest = np.full(c2.shape, np.inf)
    for center in layout.centers:
        np.minimum(nearest, np.abs(center - c2), out=nearest)

    numerator = np.zeros(c2.shape)
    denominator = np.zeros(c2.shape)
    for i, center in enumerate(layout.centers):
        distance = center - c2
        weight = np.exp(-alpha * (np.abs(distance) - nearest))
        numerator += weight * np.sign(distance) * grad_h[i][None, :]
        denominator += weight
    return numerator / denominator


def reference_histogram_backward(
    c2: np.ndarray, grad_h: np.ndarray, layout: BinLayout, alpha: float = 20.0
) -> np.ndarray:
    """Direct element-by-element evaluation of the surrogate gradient."""
    n, channels = c2.shape
    result = np.zeros((n, channels))
    for l in range(n):
        for j in range(channels):
            numerator = 0.0
            denominator = 0.0
            for i in range(layout.k):
                d = float(layout.centers[i]) - float(c2[l, j])
                w = math.exp(-alpha * abs(d))
                sign = (d > 0) - (d < 0)
                numerator += w * sign * float(grad_h[i, j])
                denominator += w
            result[l, j] = numerator / denominator
    return result


class HistogramBinning(Kernel):
    """
    n x C embeddings to a k x C histogram.

    With ``normalize`` the counts are divided by n and the incoming gradient is
    scaled the same way before the surrogate rule.
    """

    name = "histogram"

    def __init__(self, layout: BinLayout, alpha: float = 20.0, normalize: bool = False):
        self.layout = layout
        self.alpha = alpha
        self.normalize = normalize

    def forward(self, c2):
        counts = histogram_forward(c2, self.layout)
        if self.normalize:
            counts = counts / c2.shape[0]
        return counts, c2

    def backward(self, saved, grad):
        if self.normalize:
            grad = grad / saved.shape[0]
        return (histogram_backward(saved, grad, self.layout, self.alpha),)


def histogram_binning(
    c2: Var, layout: BinLayout, alpha: float = 20.0, normalize: bool = False
) -> Var:
    return c2.tape.apply(HistogramBinning(layout, alpha, normalize), c2)
