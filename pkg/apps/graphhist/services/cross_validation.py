from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from graphhist.data import GraphDataset, split_folds, split_validation
from graphhist.models import (
    CrossValidationSummary,
    EvalProtocol,
    FoldSummary,
    Metrics,
    ModelConfig,
    RunConfig,
    TrainConfig,
)
from graphhist.network import GraphHistNetwork
from graphhist.utils.logger import get_logger

from .trainer import GraphCache, TrainedFold, evaluate, train_fold

logger = get_logger(__name__)


@dataclass
class FoldRun:
    """A trained fold together with its metrics on the fold's test set."""

    fold: int
    trained: TrainedFold
    test_indices: np.ndarray
    eval_indices: np.ndarray
    test_metrics: Metrics
    test_probabilities: np.ndarray

    def summary(self) -> FoldSummary:
        return FoldSummary(
            fold=self.fold,
            accuracy=self.test_metrics.accuracy,
            precision=self.test_metrics.precision,
            recall=self.test_metrics.recall,
            f1=self.test_metrics.f1,
            best_epoch=self.trained.best_epoch,
            epochs=len(self.trained.history),
        )


def resolve_eval_split(
    dataset: GraphDataset,
    train_indices: Sequence[int],
    test_indices: Sequence[int],
    train_config: TrainConfig,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    (fit indices, eval indices) under the configured protocol.

    ``held_out_val`` carves a stratified validation set out of the training
    fold; ``test_as_val`` monitors the test fold itself.
    """
    if train_config.eval_protocol is EvalProtocol.TEST_AS_VAL:
        return np.asarray(train_indices, dtype=np.int64), np.asarray(test_indices, dtype=np.int64)
    return split_validation(
        train_indices, dataset.labels, train_config.val_fraction, train_config.seed
    )


def run_fold(
    dataset: GraphDataset,
    train_indices: Sequence[int],
    test_indices: Sequence[int],
    model_config: ModelConfig,
    train_config: TrainConfig,
    fold: int = 0,
) -> FoldRun:
    """Train on one fold and score its test set with the best-epoch model."""
    cache = GraphCache(dataset)
    fit_indices, eval_indices = resolve_eval_split(
        dataset, train_indices, test_indices, train_config
    )
    logger.info(
        f"Fold {fold}: {len(fit_indices)} train, {len(eval_indices)} eval, "
        f"{len(test_indices)} test graphs ({train_config.eval_protocol.value})"
    )
    trained = train_fold(
        dataset, fit_indices, eval_indices, model_config, train_config, cache=cache
    )
    network = GraphHistNetwork(model_config, trained.params)
    test = evaluate(
        network, cache, list(test_indices), train_config.batch_size, train_config.positive_class
    )
    logger.info(f"Fold {fold}: test accuracy {test.metrics.accuracy:.4f}")
    return FoldRun(
        fold=fold,
        trained=trained,
        test_indices=np.asarray(test_indices, dtype=np.int64),
        eval_indices=eval_indices,
        test_metrics=test.metrics,
        test_probabilities=test.probabilities,
    )


def _run_planned_fold(args) -> FoldRun:
    dataset, train_indices, test_indices, model_config, train_config, fold = args
    return run_fold(dataset, train_indices, test_indices, model_config, train_config, fold)


def summarize(
    dataset_name: str,
    runs: Sequence[FoldRun],
    model_config: ModelConfig,
    train_config: TrainConfig,
) -> CrossValidationSummary:
    """Mean and sample standard deviation of the fold test accuracies."""
    accuracies = np.array([run.test_metrics.accuracy for run in runs])
    std = float(np.std(accuracies, ddof=1)) if len(accuracies) > 1 else 0.0
    return CrossValidationSummary(
        dataset=dataset_name,
        config=RunConfig(model=model_config, train=train_config),
        folds=[run.summary() for run in runs],
        mean_accuracy=float(accuracies.mean()),
        std_accuracy=std,
    )


def cross_validate(
    dataset: GraphDataset,
    model_config: ModelConfig,
    train_config: TrainConfig,
    n_folds: int = 10,
    workers: int = 1,
    folds: Optional[Sequence[int]] = None,
) -> Tuple[List[FoldRun], CrossValidationSummary]:
    """
    Stratified k-fold cross-validation.

    Fold i trains with seed ``train_config.seed + i``; with ``workers > 1``
    folds run in separate processes and are collected in fold order.
    """
    plan = split_folds(dataset, n_folds, train_config.seed)
    selected = list(range(n_folds)) if folds is None else list(folds)
    jobs = [
        (
            dataset,
            plan[fold][0],
            plan[fold][1],
            model_config,
            train_config.model_copy(update={"seed": train_config.seed + fold}),
            fold,
        )
        for fold in selected
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_planned_fold, jobs))
    else:
        runs = [_run_planned_fold(job) for job in jobs]

    summary = summarize(dataset.name, runs, model_config, train_config)
    logger.info(f"{dataset.name}: accuracy {summary.formatted()} over {len(runs)} folds")
    return runs, summary
