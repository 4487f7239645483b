from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from graphhist.network import ModelParams
from graphhist.utils.logger import get_logger

logger = get_logger(__name__)


def sgd_step(
    params: ModelParams, grads: Dict[str, np.ndarray], lr: float, batch_size: int
) -> None:
    """
    p <- p - lr * g / batch_size for every tensor, in place.

    The loss is summed over the batch, so dividing by the batch size makes the
    update follow the mean gradient.
    """
    scale = lr / batch_size
    for name, grad in grads.items():
        params[name] -= scale * grad


class SGD:
    """Mini-batch SGD with optional momentum and weight decay (both off by default)."""

    def __init__(self, params: ModelParams, momentum: float = 0.0, weight_decay: float = 0.0):
        self.params = params
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.velocity: Dict[str, np.ndarray] = {}

    def step(self, grads: Dict[str, np.ndarray], lr: float, batch_size: int) -> None:
        if self.momentum == 0.0 and self.weight_decay == 0.0:
            sgd_step(self.params, grads, lr, batch_size)
            return
        for name, grad in grads.items():
            update = grad / batch_size
            if self.weight_decay:
                update = update + self.weight_decay * self.params[name]
            if self.momentum:
                buffer = self.velocity.get(name)
                buffer = update.copy() if buffer is None else self.momentum * buffer + update
                self.velocity[name] = buffer
                update = buffer
            self.params[name] -= lr * update


@dataclass
class SchedulerState:
    lr: float
    best: float
    bad_epochs: int = 0
    cooldown_left: int = 0


class PlateauScheduler:
    """
    Halve-on-plateau learning-rate schedule.

    An epoch improves when the monitored value is strictly better than the
    best so far. Once more than ``patience`` consecutive epochs fail to
    improve (cooldown epochs excluded) the rate is multiplied by ``factor``,
    floored at ``lr_min``, and the counter resets.
    """

    def __init__(
        self,
        lr: float,
        factor: float = 0.5,
        patience: int = 2,
        cooldown: int = 0,
        lr_min: float = 1e-7,
        mode: str = "min",
    ):
        if not 0.0 < factor < 1.0:
            raise ValueError(f"factor must lie in (0, 1), got {factor}")
        if mode not in ("min", "max"):
            raise ValueError(f"mode must be 'min' or 'max', got {mode}")
        self.factor = factor
        self.patience = patience
        self.cooldown = cooldown
        self.lr_min = lr_min
        self.mode = mode
        self.state = SchedulerState(lr=lr, best=math.inf if mode == "min" else -math.inf)

    @property
    def lr(self) -> float:
        return self.state.lr

    def _improved(self, value: float) -> bool:
        if self.mode == "min":
            return value < self.state.best
        return value > self.state.best

    def update(self, value: float) -> float:
        """Record one epoch's monitored value and return the new learning rate."""
        state = self.state
        if self._improved(value):
            state.best = value
            state.bad_epochs = 0
        else:
            state.bad_epochs += 1

        if state.cooldown_left > 0:
            state.cooldown_left -= 1
            state.bad_epochs = 0

        if state.bad_epochs > self.patience:
            new_lr = max(state.lr * self.factor, self.lr_min)
            if new_lr < state.lr:
                logger.info(f"Reducing learning rate from {state.lr:.3g} to {new_lr:.3g}")
            state.lr = new_lr
            state.cooldown_left = self.cooldown
            state.bad_epochs = 0
        return state.lr


def scheduler_update(scheduler: PlateauScheduler, monitored_value: float) -> float:
    return scheduler.update(monitored_value)
