from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from graphhist.utils.logger import get_logger

from .dataset import GraphDataset

logger = get_logger(__name__)


@dataclass(frozen=True)
class FoldPlan:
    """Stratified k-fold partition; every index is in exactly one test set."""

    folds: List[Tuple[np.ndarray, np.ndarray]]
    seed: int

    def __len__(self) -> int:
        return len(self.folds)

    def __getitem__(self, fold: int) -> Tuple[np.ndarray, np.ndarray]:
        return self.folds[fold]


def _deal(labels: np.ndarray, n_parts: int, rng: np.random.Generator) -> List[List[int]]:
    """
    Shuffle each class and deal its members round-robin into n_parts.

    The dealing position carries over from one class to the next, so overall
    part sizes differ by at most one as well as per class.
    """
    parts: List[List[int]] = [[] for _ in range(n_parts)]
    position = 0
    for label in np.unique(labels):
        members = np.flatnonzero(labels == label)
        rng.shuffle(members)
        for index in members:
            parts[position % n_parts].append(int(index))
            position += 1
    return parts


def split_folds(ds: GraphDataset, n_folds: int, seed: int) -> FoldPlan:
    """Stratified split of ``ds`` into ``n_folds`` (train, test) index pairs."""
    if n_folds < 2:
        raise ValueError(f"need at least 2 folds, got {n_folds}")
    if len(ds) < n_folds:
        raise ValueError(f"{len(ds)} graphs cannot fill {n_folds} folds")
    for label, count in enumerate(ds.class_counts()):
        if count < n_folds:
            logger.warning(
                f"class {label} has {count} graphs for {n_folds} folds; "
                f"some test folds will not contain it"
            )

    parts = _deal(ds.labels, n_folds, np.random.default_rng(seed))
    all_indices = np.arange(len(ds))
    folds = []
    for part in parts:
        test = np.array(sorted(part), dtype=np.int64)
        train = np.setdiff1d(all_indices, test)
        folds.append((train, test))
    return FoldPlan(folds=folds, seed=seed)


def split_validation(
    train_indices: Sequence[int], labels: np.ndarray, fraction: float, seed: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Carve a stratified validation set out of a training fold.

    Returns:
        Tuple of (remaining train indices, validation indices), both sorted
    """
    train_indices = np.asarray(train_indices, dtype=np.int64)
    n_parts = max(2, int(round(1.0 / fraction)))
    parts = _deal(labels[train_indices], n_parts, np.random.default_rng(seed))
    held_out = train_indices[np.array(parts[0], dtype=np.int64)]
    remaining = np.setdiff1d(train_indices, held_out)
    return remaining, np.sort(held_out)


def oversample(
    train_indices: Sequence[int], labels: np.ndarray, seed: int
) -> np.ndarray:
    """
    Resample minority classes with replacement up to the majority count.

    Every original index is kept; the result is shuffled with the same seed.
    """
    train_indices = np.asarray(train_indices, dtype=np.int64)
    if len(train_indices) == 0:
        raise ValueError("cannot oversample an empty index list")
    rng = np.random.default_rng(seed)
    train_labels = labels[train_indices]
    classes, counts = np.unique(train_labels, return_counts=True)
    target = counts.max()
    pieces = [train_indices]
    for label, count in zip(classes, counts):
        if count < target:
            members = train_indices[train_labels == label]
            pieces.append(rng.choice(members, size=target - count, replace=True))
    expanded = np.concatenate(pieces)
    return rng.permutation(expanded)
