from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from graphhist.data import Batch, GraphDataset, make_batch, oversample
from graphhist.graph import SparseLaplacian, normalized_laplacian
from graphhist.models import EpochRecord, Metrics, ModelConfig, StopMetric, TrainConfig
from graphhist.network import GraphHistNetwork, ModelParams, init_params
from graphhist.utils.logger import get_logger

from .early_stopping import best_epoch, early_stop
from .metrics import compute_metrics
from .optim import SGD, PlateauScheduler

logger = get_logger(__name__)


class GraphCache:
    """Builds batches of a dataset, computing each graph's Laplacian once."""

    def __init__(self, dataset: GraphDataset):
        self.dataset = dataset
        self._laplacians: Dict[int, SparseLaplacian] = {}

    def laplacian(self, index: int) -> SparseLaplacian:
        if index not in self._laplacians:
            self._laplacians[index] = normalized_laplacian(self.dataset.graphs[index])
        return self._laplacians[index]

    def batch(self, indices: Sequence[int]) -> Batch:
        indices = [int(i) for i in indices]
        return make_batch(
            self.dataset.subset(indices),
            self.dataset.labels[indices],
            [self.laplacian(i) for i in indices],
        )

    def batches(self, indices: Sequence[int], batch_size: int):
        for start in range(0, len(indices), batch_size):
            chunk = indices[start : start + batch_size]
            yield chunk, self.batch(chunk)


@dataclass
class EvaluationResult:
    loss: float
    metrics: Metrics
    probabilities: np.ndarray
    predictions: np.ndarray


@dataclass
class TrainedFold:
    """Best-epoch parameters, the epoch history and the final eval metrics."""

    config: ModelConfig
    params: ModelParams
    history: List[EpochRecord]
    metrics: Metrics
    best_epoch: int
    eval_loss: float
    monitored: List[float] = field(default_factory=list)


def evaluate(
    network: GraphHistNetwork,
    cache: GraphCache,
    indices: Sequence[int],
    batch_size: int,
    positive_class: int = 1,
) -> EvaluationResult:
    """Evaluation-mode loss (mean per graph) and metrics over ``indices``."""
    if len(indices) == 0:
        raise ValueError("cannot evaluate an empty index set")
    total = 0.0
    probabilities = []
    for _, batch in cache.batches(list(indices), batch_size):
        result = network.forward(batch, train_mode=False)
        total += result.loss
        probabilities.append(result.probabilities)
    probabilities = np.vstack(probabilities)
    predictions = probabilities.argmax(axis=1)
    metrics = compute_metrics(
        predictions,
        cache.dataset.labels[np.asarray(indices, dtype=np.int64)],
        positive_class=positive_class,
        num_classes=cache.dataset.num_classes,
    )
    return EvaluationResult(
        loss=total / len(indices),
        metrics=metrics,
        probabilities=probabilities,
        predictions=predictions,
    )


def train_fold(
    dataset: GraphDataset,
    train_indices: Sequence[int],
    eval_indices: Sequence[int],
    model_config: ModelConfig,
    train_config: TrainConfig,
    cache: Optional[GraphCache] = None,
) -> TrainedFold:
    """
    Train one model and return its best-epoch state.

    The eval split drives the learning-rate schedule (eval loss) and early
    stopping (eval loss or eval F1). The parameters of the best epoch under
    the stop metric are restored before the final evaluation.
    """
    if len(train_indices) == 0 or len(eval_indices) == 0:
        raise ValueError("train and eval index sets must both be nonempty")
    cache = cache or GraphCache(dataset)
    rng = np.random.default_rng(train_config.seed)
    params = init_params(model_config, train_config.seed)
    network = GraphHistNetwork(model_config, params)
    optimizer = SGD(params, train_config.momentum, train_config.weight_decay)
    scheduler = PlateauScheduler(
        train_config.lr,
        factor=train_config.factor,
        patience=train_config.patience,
        cooldown=train_config.cooldown,
        lr_min=train_config.lr_min,
    )

    pool = np.asarray(train_indices, dtype=np.int64)
    if train_config.oversample:
        # the resampled multiset is drawn once; epochs only reshuffle it
        pool = oversample(pool, dataset.labels, train_config.seed)
        logger.info(
            f"Oversampled training set from {len(train_indices)} to {len(pool)} graphs"
        )
    eval_indices = list(eval_indices)
    metric = train_config.stop_metric
    f1_mode = metric is StopMetric.F1

    history: List[EpochRecord] = []
    monitored: List[float] = []
    best_params = params.copy()
    best_index = -1
    for epoch in range(1, train_config.max_epochs + 1):
        lr = scheduler.lr
        order = rng.permutation(pool)
        total = 0.0
        for chunk, batch in cache.batches(order, train_config.batch_size):
            result = network.forward(batch, train_mode=True, rng=rng)
            grads = network.backward(result)
            optimizer.step(grads, lr, len(chunk))
            total += result.loss
            logger.debug(f"epoch {epoch}: batch of {len(chunk)} loss {result.loss:.6f}")

        evaluation = evaluate(
            network, cache, eval_indices, train_config.batch_size, train_config.positive_class
        )
        record = EpochRecord(
            epoch=epoch,
            lr=lr,
            train_loss=total / len(pool),
            eval_loss=evaluation.loss,
            eval_accuracy=evaluation.metrics.accuracy,
            eval_f1=evaluation.metrics.f1 if f1_mode else None,
        )
        history.append(record)
        monitored.append(evaluation.metrics.f1 if f1_mode else evaluation.loss)
        logger.info(
            f"epoch {epoch}: lr {lr:.3g} train loss {record.train_loss:.4f} "
            f"eval loss {record.eval_loss:.4f} eval acc {record.eval_accuracy:.4f}"
        )

        current_best = best_epoch(monitored, metric)
        if current_best != best_index:
            best_index = current_best
            best_params = params.copy()

        scheduler.update(evaluation.loss)
        if train_config.early_stopping and early_stop(
            monitored, train_config.stop_patience, metric
        ):
            logger.info(
                f"Stopping after epoch {epoch}: no progress since epoch {best_index + 1}"
            )
            break

    for name, value in best_params.items():
        np.copyto(params[name], value)
    final = evaluate(
        network, cache, eval_indices, train_config.batch_size, train_config.positive_class
    )
    return TrainedFold(
        config=model_config,
        params=params,
        history=history,
        metrics=final.metrics,
        best_epoch=best_index + 1,
        eval_loss=final.loss,
        monitored=monitored,
    )
