"""
The Graph-Hist network.

Parallel GCN branches over Laplacian powers 0..h are concatenated and mixed by
two combination layers; the result is binned into one histogram per graph,
and a 1-D LeNet variant classifies the histograms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from graphhist.data import Batch
from graphhist.graph import SparseLaplacian, laplacian_power_apply
from graphhist.models import ModelConfig
from graphhist.nn import (
    Tape,
    Var,
    affine,
    bin_centers,
    concat,
    conv1d,
    dropout,
    flatten_concat,
    histogram_binning,
    maxpool1d,
    relu_act,
    row_slice,
    softmax_cross_entropy,
    stack,
    tanh_act,
    transpose,
)

from .params import ModelParams


@dataclass
class ForwardResult:
    """Loss, per-graph probabilities and the tape needed for the backward pass."""

    loss: float
    probabilities: np.ndarray
    tape: Tape
    loss_var: Var
    param_vars: Dict[str, Var]
    histograms: List[np.ndarray]


class GraphHistNetwork:
    """Forward and backward passes of Graph-Hist for a fixed config."""

    def __init__(self, config: ModelConfig, params: ModelParams):
        problems = params.check_shapes(config)
        if problems:
            raise ValueError(f"parameters do not match the config: {problems[:5]}")
        self.config = config
        self.params = params
        self.layout = bin_centers(config.k)

    def bind(self, tape: Tape) -> Dict[str, Var]:
        """Record every parameter as a leaf of ``tape``."""
        return {name: tape.leaf(value) for name, value in self.params.items()}

    @staticmethod
    def gcn_branch(
        tape: Tape,
        laplacian: SparseLaplacian,
        features: np.ndarray,
        power: int,
        weight: Var,
        bias: Var,
    ) -> Var:
        """Z_s = tanh(L^s X W_s + b_s); L^s X is a constant of the tape."""
        propagated = tape.leaf(laplacian_power_apply(laplacian, features, power))
        return tanh_act(affine(propagated, weight, bias))

    def embed(self, tape: Tape, batch: Batch, bound: Dict[str, Var]) -> Var:
        """Node embeddings C2 (n x (h+1)u), bounded in (-1, 1)."""
        branches = [
            self.gcn_branch(
                tape,
                batch.laplacian,
                batch.features,
                s,
                bound[f"gcn.{s}.weight"],
                bound[f"gcn.{s}.bias"],
            )
            for s in range(self.config.h + 1)
        ]
        z = concat(branches, axis=1) if len(branches) > 1 else branches[0]
        c1 = tanh_act(affine(z, bound["comb1.weight"], bound["comb1.bias"]))
        return tanh_act(affine(c1, bound["comb2.weight"], bound["comb2.bias"]))

    def histograms(self, c2: Var, batch: Batch) -> List[Var]:
        """One k x C histogram per graph of the batch."""
        result = []
        for g in range(len(batch)):
            rows = batch.node_range(g)
            nodes = c2 if len(batch) == 1 else row_slice(c2, rows.start, rows.stop)
            result.append(
                histogram_binning(
                    nodes, self.layout, self.config.alpha, self.config.normalize_histogram
                )
            )
        return result

    def lenet_forward(
        self,
        histograms: List[Var],
        bound: Dict[str, Var],
        train_mode: bool,
        rng: Optional[np.random.Generator] = None,
    ) -> Var:
        """
        Classify k x C histograms; returns B x m logits.

        Four sub-modules conv(f) -> relu -> maxpool(2) -> conv(f) -> relu for
        each filter size, one convolution spanning all k bins, then
        dropout -> fc -> relu -> dropout -> fc.
        """
        h = transpose(stack(histograms), (0, 2, 1))  # B x C x k
        features = []
        for f in self.config.filter_sizes:
            prefix = f"lenet.f{f}"
            x = relu_act(conv1d(h, bound[f"{prefix}.conv1.weight"], bound[f"{prefix}.conv1.bias"]))
            x = maxpool1d(x)
            x = relu_act(conv1d(x, bound[f"{prefix}.conv2.weight"], bound[f"{prefix}.conv2.bias"]))
            features.append(x)
        features.append(
            relu_act(conv1d(h, bound["lenet.span.weight"], bound["lenet.span.bias"]))
        )
        x = flatten_concat(features, batched=True)
        x = dropout(x, self.config.dropout, train_mode, rng)
        x = relu_act(affine(x, bound["fc1.weight"], bound["fc1.bias"]))
        x = dropout(x, self.config.dropout, train_mode, rng)
        return affine(x, bound["out.weight"], bound["out.bias"])

    def forward(
        self,
        batch: Batch,
        train_mode: bool = False,
        rng: Optional[np.random.Generator] = None,
    ) -> ForwardResult:
        """Summed cross entropy of the batch and its softmax probabilities."""
        tape = Tape()
        bound = self.bind(tape)
        c2 = self.embed(tape, batch, bound)
        histograms = self.histograms(c2, batch)
        logits = self.lenet_forward(histograms, bound, train_mode, rng)
        loss, probabilities = softmax_cross_entropy(logits, batch.labels)
        return ForwardResult(
            loss=float(loss.value),
            probabilities=probabilities,
            tape=tape,
            loss_var=loss,
            param_vars=bound,
            histograms=[var.value for var in histograms],
        )

    def backward(self, result: ForwardResult) -> Dict[str, np.ndarray]:
        """
        Gradient of the summed loss for every parameter.

        The histogram node's backward applies the surrogate binning rule, so
        parameters upstream of it receive surrogate gradients.
        """
        names = list(result.param_vars)
        grads = result.tape.backward(
            {result.loss_var: np.asarray(1.0)},
            [result.param_vars[name] for name in names],
        )
        return {
            name: np.zeros_like(self.params[name]) if grad is None else grad
            for name, grad in zip(names, grads)
        }

    def predict(self, batch: Batch) -> np.ndarray:
        """Evaluation-mode class probabilities, B x m."""
        return self.forward(batch, train_mode=False).probabilities
