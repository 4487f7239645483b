"""
Self-check of the differentiation layer: every kernel against central finite
differences on random shapes, and the vectorised binning backward against its
element-by-element reference.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from graphhist.models import GradCheckEntry, GradCheckReport
from graphhist.nn import (
    Affine,
    Concat,
    Conv1d,
    Dropout,
    FlattenConcat,
    Kernel,
    MatMul,
    MaxPool1d,
    Relu,
    RowSlice,
    SoftmaxCrossEntropy,
    Stack,
    Tanh,
    Transpose,
    bin_centers,
    histogram_backward,
    reference_histogram_backward,
)
from graphhist.nn.gradcheck import grad_check, relative_error
from graphhist.utils.logger import get_logger

logger = get_logger(__name__)

Case = Tuple[Kernel, List[np.ndarray], Optional[List[int]]]


class SignFlipped(Kernel):
    """Wraps a kernel and negates its backward pass."""

    def __init__(self, inner: Kernel):
        self.inner = inner
        self.name = inner.name

    def forward(self, *inputs):
        return self.inner.forward(*inputs)

    def backward(self, saved, grad):
        return tuple(None if g is None else -g for g in self.inner.backward(saved, grad))


def _away_from_zero(x: np.ndarray) -> np.ndarray:
    """Keep entries at least 0.05 from the ReLU kink."""
    return np.where(x >= 0, x + 0.05, x - 0.05)


def _matmul_case(rng) -> Case:
    p, q, r = rng.integers(1, 6, size=3)
    return MatMul(), [rng.standard_normal((p, q)), rng.standard_normal((q, r))], None


def _affine_case(rng) -> Case:
    n, p, q = rng.integers(1, 6, size=3)
    inputs = [rng.standard_normal((n, p)), rng.standard_normal((p, q)), rng.standard_normal(q)]
    return Affine(), inputs, None


def _tanh_case(rng) -> Case:
    shape = tuple(rng.integers(1, 6, size=rng.integers(1, 4)))
    return Tanh(), [rng.standard_normal(shape)], None


def _relu_case(rng) -> Case:
    shape = tuple(rng.integers(1, 6, size=rng.integers(1, 4)))
    return Relu(), [_away_from_zero(rng.standard_normal(shape))], None


def _dropout_case(rng) -> Case:
    shape = tuple(rng.integers(1, 6, size=rng.integers(1, 4)))
    rate = float(rng.uniform(0.1, 0.7))
    mask = rng.random(shape) >= rate
    return Dropout(rate, train_mode=True, mask=mask), [rng.standard_normal(shape)], None


def _conv1d_case(rng) -> Case:
    c_in, c_out = rng.integers(1, 5, size=2)
    length = int(rng.integers(2, 12))
    f = int(rng.integers(1, min(length, 6) + 1))
    shape = (int(rng.integers(1, 4)), c_in, length) if rng.random() < 0.5 else (c_in, length)
    inputs = [
        rng.standard_normal(shape),
        rng.standard_normal((c_out, c_in, f)),
        rng.standard_normal(c_out),
    ]
    return Conv1d(), inputs, None


def _maxpool_case(rng) -> Case:
    channels, length = int(rng.integers(1, 5)), int(rng.integers(2, 10))
    # a permutation keeps every pair at least 0.1 apart, far from ties
    values = rng.permutation(channels * length).reshape(channels, length) * 0.1
    return MaxPool1d(), [values.astype(np.float64)], None


def _flatten_case(rng) -> Case:
    parts = [
        rng.standard_normal(tuple(rng.integers(1, 5, size=rng.integers(1, 4))))
        for _ in range(int(rng.integers(1, 4)))
    ]
    return FlattenConcat(), parts, None


def _concat_case(rng) -> Case:
    rows, axis = int(rng.integers(1, 5)), int(rng.integers(0, 2))
    parts = []
    for _ in range(int(rng.integers(1, 4))):
        width = int(rng.integers(1, 5))
        parts.append(rng.standard_normal((width, rows) if axis == 0 else (rows, width)))
    return Concat(axis), parts, None


def _row_slice_case(rng) -> Case:
    n = int(rng.integers(2, 8))
    start = int(rng.integers(0, n - 1))
    stop = int(rng.integers(start + 1, n + 1))
    return RowSlice(start, stop), [rng.standard_normal((n, int(rng.integers(1, 4))))], None


def _stack_case(rng) -> Case:
    shape = tuple(rng.integers(1, 5, size=2))
    return Stack(), [rng.standard_normal(shape) for _ in range(int(rng.integers(1, 4)))], None


def _transpose_case(rng) -> Case:
    shape = tuple(rng.integers(1, 5, size=3))
    return Transpose(tuple(rng.permutation(3))), [rng.standard_normal(shape)], None


def _softmax_case(rng) -> Case:
    m, rows = int(rng.integers(2, 7)), int(rng.integers(1, 5))
    targets = rng.integers(0, m, size=rows)
    return SoftmaxCrossEntropy(targets), [rng.standard_normal((rows, m)) * 3.0], None


CASES: Dict[str, Callable[[np.random.Generator], Case]] = {
    "matmul": _matmul_case,
    "affine": _affine_case,
    "tanh": _tanh_case,
    "relu": _relu_case,
    "dropout": _dropout_case,
    "conv1d": _conv1d_case,
    "maxpool1d": _maxpool_case,
    "flatten_concat": _flatten_case,
    "concat": _concat_case,
    "row_slice": _row_slice_case,
    "stack": _stack_case,
    "transpose": _transpose_case,
    "softmax_cross_entropy": _softmax_case,
}


def check_kernel(
    name: str,
    cases: int = 20,
    seed: int = 0,
    step: float = 1e-5,
    tol: float = 1e-4,
    inject_fault: bool = False,
) -> GradCheckEntry:
    rng = np.random.default_rng(seed)
    errors = []
    for _ in range(cases):
        kernel, inputs, wrt = CASES[name](rng)
        if inject_fault:
            kernel = SignFlipped(kernel)
        result = grad_check(kernel, inputs, step=step, tol=tol, seed=int(rng.integers(2**31)), wrt=wrt)
        errors.append(result.max_rel_error)
    worst = max(errors)
    return GradCheckEntry(
        kernel=name, cases=cases, max_rel_error=worst, tolerance=tol, passed=worst <= tol
    )


def check_binning_oracle(
    instances: int = 1000, seed: int = 0, tol: float = 1e-12, alpha: float = 20.0
) -> GradCheckEntry:
    """Vectorised surrogate backward vs the element-by-element reference."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        n, channels = int(rng.integers(1, 51)), int(rng.integers(1, 17))
        layout = bin_centers(int(rng.choice([2, 10, 25])))
        c2 = rng.uniform(-1.0, 1.0, size=(n, channels))
        grad_h = rng.standard_normal((layout.k, channels))
        fast = histogram_backward(c2, grad_h, layout, alpha)
        slow = reference_histogram_backward(c2, grad_h, layout, alpha)
        worst = max(worst, relative_error(fast, slow))
    return GradCheckEntry(
        kernel="histogram_backward",
        cases=instances,
        max_rel_error=worst,
        tolerance=tol,
        passed=worst <= tol,
    )


def run_gradcheck_suite(
    cases: int = 20,
    oracle_instances: int = 1000,
    seed: int = 0,
    inject_fault: Optional[str] = None,
) -> GradCheckReport:
    """Run every kernel check plus the binning oracle."""
    if inject_fault is not None and inject_fault not in CASES:
        raise ValueError(f"unknown kernel {inject_fault!r}; choose from {sorted(CASES)}")
    entries = []
    for offset, name in enumerate(CASES):
        entry = check_kernel(
            name, cases=cases, seed=seed + offset, inject_fault=name == inject_fault
        )
        status = "PASS" if entry.passed else "FAIL"
        logger.info(f"{name}: max rel. err {entry.max_rel_error:.3e} [{status}]")
        entries.append(entry)
    oracle = check_binning_oracle(oracle_instances, seed=seed)
    logger.info(
        f"histogram_backward: max rel. err {oracle.max_rel_error:.3e} "
        f"[{'PASS' if oracle.passed else 'FAIL'}]"
    )
    entries.append(oracle)
    return GradCheckReport(entries=entries, injected_fault=inject_fault)
