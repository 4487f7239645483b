"""
Reverse-mode differentiation by composition of kernels.

A ``Tape`` records every kernel application as a ``TapeNode``; ``backward``
walks the nodes in exact reverse order of recording, which is a reverse
topological order of the forward computation.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, ClassVar, Dict, Iterable, List, Optional, Tuple

import numpy as np


class Kernel(ABC):
    """A differentiable operation with explicit forward and backward passes."""

    name: ClassVar[str]

    @abstractmethod
    def forward(self, *inputs: np.ndarray) -> Tuple[np.ndarray, Any]:
        """Return the output and whatever the backward pass needs."""

    @abstractmethod
    def backward(
        self, saved: Any, grad: np.ndarray
    ) -> Tuple[Optional[np.ndarray], ...]:
        """Return one gradient per input (None for non-differentiable inputs)."""


@dataclass(frozen=True)
class TapeNode:
    op: str
    kernel: Kernel
    inputs: Tuple[int, ...]
    output: int
    saved: Any


@dataclass(frozen=True)
class Var:
    """Handle to a value recorded on a tape."""

    tape: "Tape"
    index: int

    @property
    def value(self) -> np.ndarray:
        return self.tape.values[self.index]

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.value.shape


class Tape:
    """Records a forward computation for one backward sweep."""

    def __init__(self):
        self.values: List[np.ndarray] = []
        self.nodes: List[TapeNode] = []

    def leaf(self, value: np.ndarray) -> Var:
        self.values.append(np.asarray(value, dtype=np.float64))
        return Var(self, len(self.values) - 1)

    def apply(self, kernel: Kernel, *inputs: Var) -> Var:
        for var in inputs:
            if var.tape is not self:
                raise ValueError(f"{kernel.name}: input recorded on another tape")
        output, saved = kernel.forward(*(var.value for var in inputs))
        self.values.append(output)
        index = len(self.values) - 1
        self.nodes.append(
            TapeNode(kernel.name, kernel, tuple(var.index for var in inputs), index, saved)
        )
        return Var(self, index)

    def backward(
        self, seeds: Dict[Var, np.ndarray], wrt: Iterable[Var]
    ) -> List[Optional[np.ndarray]]:
        """
        Propagate ``seeds`` (output gradients) back to the variables in ``wrt``.

        Gradients reaching the same value are summed in the fixed order the
        nodes are visited, so results do not depend on anything but the tape.
        A variable no gradient reaches gets None.
        """
        grads: Dict[int, np.ndarray] = {}
        for var, seed in seeds.items():
            grads[var.index] = np.asarray(seed, dtype=np.float64)
        for node in reversed(self.nodes):
            grad = grads.get(node.output)
            if grad is None:
                continue
            input_grads = node.kernel.backward(node.saved, grad)
            for index, input_grad in zip(node.inputs, input_grads):
                if input_grad is None:
                    continue
                if index in grads:
                    grads[index] = grads[index] + input_grad
                else:
                    grads[index] = input_grad
        return [grads.get(var.index) for var in wrt]
