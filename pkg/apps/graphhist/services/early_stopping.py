from __future__ import annotations

import math
from typing import Sequence

from graphhist.models import StopMetric


def _lower_is_better(metric: StopMetric | str) -> bool:
    return StopMetric(metric) is StopMetric.LOSS


def best_epoch(history: Sequence[float], metric: StopMetric | str = StopMetric.LOSS) -> int:
    """Index of the first strict best value of the history (-1 when empty)."""
    lower = _lower_is_better(metric)
    best_index = -1
    best = math.inf if lower else -math.inf
    for index, value in enumerate(history):
        if (value < best) if lower else (value > best):
            best, best_index = value, index
    return best_index


def early_stop(
    history: Sequence[float],
    stop_patience: int = 9,
    metric: StopMetric | str = StopMetric.LOSS,
) -> bool:
    """
    True once ``stop_patience`` epochs have passed without a strict improvement.

    Loss improves by decreasing, F1 by increasing.
    """
    if not history:
        return False
    return len(history) - 1 - best_epoch(history, metric) >= stop_patience
