from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .tape import Kernel


@dataclass
class GradCheckResult:
    """Outcome of comparing a backward pass with central differences."""

    kernel: str
    errors: List[float] = field(default_factory=list)
    tolerance: float = 1e-4

    @property
    def max_rel_error(self) -> float:
        return max(self.errors, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_rel_error <= self.tolerance


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """
    Norm-wise relative error max|a - n| / max(max|a|, max|n|).

    Both near zero counts as agreement.
    """
    scale = max(np.max(np.abs(analytic), initial=0.0), np.max(np.abs(numeric), initial=0.0))
    if scale < 1e-10:
        return 0.0
    return float(np.max(np.abs(analytic - numeric)) / scale)


def numeric_gradient(
    f: Callable[[], float],
    x: np.ndarray,
    step: float = 1e-5,
    coords: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """
    Central differences of ``f`` with respect to ``x``, perturbed in place.

    Only the flat coordinates in ``coords`` are evaluated (all by default);
    the others are left at zero. ``x`` is restored after each probe.
    """
    flat = x.reshape(-1)
    grad = np.zeros(flat.shape)
    for c in range(flat.size) if coords is None else coords:
        original = flat[c]
        flat[c] = original + step
        upper = f()
        flat[c] = original - step
        lower = f()
        flat[c] = original
        grad[c] = (upper - lower) / (2.0 * step)
    return grad.reshape(x.shape)


def grad_check(
    kernel: Kernel,
    inputs: Sequence[np.ndarray],
    step: float = 1e-5,
    tol: float = 1e-4,
    seed: int = 0,
    wrt: Optional[Sequence[int]] = None,
) -> GradCheckResult:
    """
    Check ``kernel.backward`` against central differences of its forward.

    The scalar probed is sum(forward(inputs) * R) for a fixed random R, so
    every output entry contributes. ``wrt`` selects which inputs to check.
    """
    inputs = [np.array(value, dtype=np.float64) for value in inputs]
    output, saved = kernel.forward(*inputs)
    projection = np.random.default_rng(seed).standard_normal(output.shape)
    analytic = kernel.backward(saved, projection)

    def probe() -> float:
        return float(np.sum(kernel.forward(*inputs)[0] * projection))

    result = GradCheckResult(kernel=kernel.name, tolerance=tol)
    for position in range(len(inputs)) if wrt is None else wrt:
        numeric = numeric_gradient(probe, inputs[position], step)
        result.errors.append(relative_error(analytic[position], numeric))
    return result
