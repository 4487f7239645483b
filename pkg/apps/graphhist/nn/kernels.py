"""
Dense kernels of the network, each with an explicit backward pass.

Every kernel works on float64 arrays. The lowercase helpers at the bottom
record a kernel on the tape of their first argument.
"""

from __future__ import annotations

from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import log_softmax

from graphhist.exceptions import ShapeError

from .tape import Kernel, Var


class MatMul(Kernel):
    name = "matmul"

    def forward(self, a, b):
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise ShapeError(f"matmul: cannot multiply {a.shape} by {b.shape}")
        return a @ b, (a, b)

    def backward(self, saved, grad):
        a, b = saved
        return grad @ b.T, a.T @ grad


class Affine(Kernel):
    """X W + b with b broadcast over rows."""

    name = "affine"

    def forward(self, x, w, b):
        if x.ndim != 2 or w.ndim != 2 or x.shape[1] != w.shape[0]:
            raise ShapeError(f"affine: cannot multiply {x.shape} by {w.shape}")
        if b.shape != (w.shape[1],):
            raise ShapeError(f"affine: bias {b.shape} does not match {w.shape[1]} outputs")
        return x @ w + b, (x, w)

    def backward(self, saved, grad):
        x, w = saved
        return grad @ w.T, x.T @ grad, grad.sum(axis=0)


class Tanh(Kernel):
    name = "tanh"

    def forward(self, x):
        y = np.tanh(x)
        return y, y

    def backward(self, saved, grad):
        return (grad * (1.0 - saved * saved),)


class Relu(Kernel):
    name = "relu"

    def forward(self, x):
        mask = x > 0
        return np.where(mask, x, 0.0), mask

    def backward(self, saved, grad):
        # gradient at exactly 0 is 0
        return (grad * saved,)


class Dropout(Kernel):
    """
    Inverted dropout: survivors are scaled by 1/(1 - rate), evaluation is the
    identity. A fixed ``mask`` may be supplied to freeze the draw.
    """

    name = "dropout"

    def __init__(
        self,
        rate: float,
        train_mode: bool,
        rng: Optional[np.random.Generator] = None,
        mask: Optional[np.ndarray] = None,
    ):
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"dropout rate must lie in [0, 1), got {rate}")
        if train_mode and rate > 0 and rng is None and mask is None:
            raise ValueError("dropout in train mode needs a random generator")
        self.rate = rate
        self.train_mode = train_mode
        self.rng = rng
        self.mask = mask

    def forward(self, x):
        if not self.train_mode or self.rate == 0.0:
            return x.copy(), None
        keep = self.mask if self.mask is not None else self.rng.random(x.shape) >= self.rate
        if keep.shape != x.shape:
            raise ShapeError(f"dropout: mask {keep.shape} does not match input {x.shape}")
        scale = keep / (1.0 - self.rate)
        return x * scale, scale

    def backward(self, saved, grad):
        if saved is None:
            return (grad,)
        return (grad * saved,)


class Conv1d(Kernel):
    """
    Valid cross-correlation with stride 1 plus a per-output-channel bias.

    Input is C_in x L or B x C_in x L; the kernel is C_out x C_in x f.
    """

    name = "conv1d"

    def forward(self, x, kernel, bias):
        batched = x.ndim == 3
        xb = x if batched else x[None]
        if xb.ndim != 3 or kernel.ndim != 3:
            raise ShapeError(f"conv1d: bad ranks {x.shape}, {kernel.shape}")
        c_out, c_in, f = kernel.shape
        if xb.shape[1] != c_in:
            raise ShapeError(f"conv1d: input has {xb.shape[1]} channels, kernel expects {c_in}")
        if bias.shape != (c_out,):
            raise ShapeError(f"conv1d: bias {bias.shape} does not match {c_out} channels")
        length = xb.shape[2]
        if f > length:
            raise ShapeError(f"conv1d: filter size {f} exceeds input length {length}")
        windows = sliding_window_view(xb, f, axis=2)  # B x C_in x L_out x f
        out = np.tensordot(windows, kernel, axes=([1, 3], [1, 2])).transpose(0, 2, 1)
        out = out + bias[None, :, None]
        if not batched:
            out = out[0]
        return np.ascontiguousarray(out), (xb, kernel, batched)

    def backward(self, saved, grad):
        xb, kernel, batched = saved
        gb = grad if batched else grad[None]
        f = kernel.shape[2]
        out_len = gb.shape[2]
        windows = sliding_window_view(xb, f, axis=2)
        grad_kernel = np.tensordot(gb, windows, axes=([0, 2], [0, 2]))
        grad_bias = gb.sum(axis=(0, 2))
        grad_x = np.zeros_like(xb)
        for j in range(f):
            grad_x[:, :, j : j + out_len] += np.tensordot(
                gb, kernel[:, :, j], axes=([1], [0])
            ).transpose(0, 2, 1)
        if not batched:
            grad_x = grad_x[0]
        return grad_x, grad_kernel, grad_bias


class MaxPool1d(Kernel):
    """Window 2, stride 2 over the last axis; an odd trailing element is dropped."""

    name = "maxpool1d"

    def forward(self, x):
        half = x.shape[-1] // 2
        pairs = x[..., : 2 * half].reshape(*x.shape[:-1], half, 2)
        # argmax returns the first position on ties
        winner = pairs.argmax(axis=-1)
        out = np.take_along_axis(pairs, winner[..., None], axis=-1)[..., 0]
        return out, (x.shape, winner)

    def backward(self, saved, grad):
        shape, winner = saved
        half = shape[-1] // 2
        routed = np.zeros((*shape[:-1], half, 2))
        np.put_along_axis(routed, winner[..., None], grad[..., None], axis=-1)
        grad_x = np.zeros(shape)
        grad_x[..., : 2 * half] = routed.reshape(*shape[:-1], 2 * half)
        return (grad_x,)


class FlattenConcat(Kernel):
    """
    Row-major flatten of every part, concatenated in argument order.

    With ``batched`` the leading axis is kept, giving a B x D matrix.
    """

    name = "flatten_concat"

    def __init__(self, batched: bool = False):
        self.batched = batched

    def forward(self, *parts):
        if self.batched:
            leading = {part.shape[0] for part in parts}
            if len(leading) != 1:
                raise ShapeError(f"flatten_concat: batch sizes differ {sorted(leading)}")
            flat = [part.reshape(part.shape[0], -1) for part in parts]
            return np.concatenate(flat, axis=1), [part.shape for part in parts]
        flat = [part.reshape(-1) for part in parts]
        return np.concatenate(flat), [part.shape for part in parts]

    def backward(self, saved, grad):
        grads = []
        offset = 0
        for shape in saved:
            size = int(np.prod(shape[1:] if self.batched else shape))
            piece = grad[:, offset : offset + size] if self.batched else grad[offset : offset + size]
            grads.append(piece.reshape(shape))
            offset += size
        return tuple(grads)


class Concat(Kernel):
    name = "concat"

    def __init__(self, axis: int):
        self.axis = axis

    def forward(self, *parts):
        return np.concatenate(parts, axis=self.axis), [part.shape[self.axis] for part in parts]

    def backward(self, saved, grad):
        cuts = np.cumsum(saved)[:-1]
        return tuple(np.split(grad, cuts, axis=self.axis))


class RowSlice(Kernel):
    name = "row_slice"

    def __init__(self, start: int, stop: int):
        self.start = start
        self.stop = stop

    def forward(self, x):
        return x[self.start : self.stop].copy(), x.shape

    def backward(self, saved, grad):
        grad_x = np.zeros(saved)
        grad_x[self.start : self.stop] = grad
        return (grad_x,)


class Stack(Kernel):
    """Stack equally shaped parts along a new leading axis."""

    name = "stack"

    def forward(self, *parts):
        return np.stack(parts), len(parts)

    def backward(self, saved, grad):
        return tuple(grad[i] for i in range(saved))


class Transpose(Kernel):
    name = "transpose"

    def __init__(self, axes: Sequence[int]):
        self.axes = tuple(axes)

    def forward(self, x):
        return np.ascontiguousarray(x.transpose(self.axes)), None

    def backward(self, saved, grad):
        return (grad.transpose(np.argsort(self.axes)),)


class SoftmaxCrossEntropy(Kernel):
    """
    Summed cross entropy of softmax(logits) against integer targets.

    Logits are a length-m vector with one target, or B x m with B targets.
    The output is a scalar; ``saved`` holds the probabilities.
    """

    name = "softmax_cross_entropy"

    def __init__(self, targets: int | Sequence[int]):
        self.targets = np.atleast_1d(np.asarray(targets, dtype=np.int64))

    def forward(self, logits):
        batched = logits.ndim == 2
        lb = logits if batched else logits[None]
        if lb.shape[0] != len(self.targets):
            raise ShapeError(f"softmax: {lb.shape[0]} rows but {len(self.targets)} targets")
        num_classes = lb.shape[1]
        if np.any(self.targets < 0) or np.any(self.targets >= num_classes):
            raise ValueError(f"class index outside [0, {num_classes})")
        log_probs = log_softmax(lb, axis=1)
        rows = np.arange(lb.shape[0])
        loss = -log_probs[rows, self.targets].sum()
        probs = np.exp(log_probs)
        return np.asarray(loss), (probs, batched)

    def backward(self, saved, grad):
        probs, batched = saved
        delta = probs.copy()
        delta[np.arange(probs.shape[0]), self.targets] -= 1.0
        delta = grad * delta
        return (delta if batched else delta[0],)


def matmul(a: Var, b: Var) -> Var:
    return a.tape.apply(MatMul(), a, b)


def affine(x: Var, w: Var, b: Var) -> Var:
    return x.tape.apply(Affine(), x, w, b)


def tanh_act(x: Var) -> Var:
    return x.tape.apply(Tanh(), x)


def relu_act(x: Var) -> Var:
    return x.tape.apply(Relu(), x)


def dropout(
    x: Var, rate: float, train_mode: bool, rng: Optional[np.random.Generator] = None
) -> Var:
    return x.tape.apply(Dropout(rate, train_mode, rng), x)


def conv1d(x: Var, kernel: Var, bias: Var) -> Var:
    return x.tape.apply(Conv1d(), x, kernel, bias)


def maxpool1d(x: Var) -> Var:
    return x.tape.apply(MaxPool1d(), x)


def flatten_concat(parts: Sequence[Var], batched: bool = False) -> Var:
    return parts[0].tape.apply(FlattenConcat(batched), *parts)


def concat(parts: Sequence[Var], axis: int) -> Var:
    return parts[0].tape.apply(Concat(axis), *parts)


def row_slice(x: Var, start: int, stop: int) -> Var:
    return x.tape.apply(RowSlice(start, stop), x)


def stack(parts: Sequence[Var]) -> Var:
    return parts[0].tape.apply(Stack(), *parts)


def transpose(x: Var, axes: Sequence[int]) -> Var:
    return x.tape.apply(Transpose(axes), x)


def softmax_cross_entropy(logits: Var, targets: int | Sequence[int]) -> Tuple[Var, np.ndarray]:
    """Record the loss and return it with the softmax probabilities."""
    loss = logits.tape.apply(SoftmaxCrossEntropy(targets), logits)
    probs, batched = logits.tape.nodes[-1].saved
    return loss, probs if batched else probs[0]
