from __future__ import annotations

from typing import Optional, Sequence

import numpy as np
from sklearn.metrics import accuracy_score, confusion_matrix

from graphhist.models import Metrics


def f1_from_precision_recall(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if precision + recall <= 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def compute_metrics(
    predictions: Sequence[int],
    labels: Sequence[int],
    positive_class: int = 1,
    num_classes: Optional[int] = None,
) -> Metrics:
    """
    Accuracy over all classes; precision, recall and F1 of ``positive_class``.

    Rows of the confusion matrix are true classes, columns predictions.
    """
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if len(predictions) != len(labels):
        raise ValueError(f"{len(predictions)} predictions for {len(labels)} labels")
    if len(labels) == 0:
        raise ValueError("cannot score an empty set")
    if num_classes is None:
        num_classes = int(max(predictions.max(), labels.max(), positive_class)) + 1

    matrix = confusion_matrix(labels, predictions, labels=list(range(num_classes)))
    true_positive = matrix[positive_class, positive_class]
    predicted_positive = matrix[:, positive_class].sum()
    actual_positive = matrix[positive_class, :].sum()
    precision = true_positive / predicted_positive if predicted_positive else 0.0
    recall = true_positive / actual_positive if actual_positive else 0.0

    return Metrics(
        accuracy=float(accuracy_score(labels, predictions)),
        precision=float(precision),
        recall=float(recall),
        f1=f1_from_precision_recall(float(precision), float(recall)),
        positive_class=positive_class,
        confusion_matrix=matrix.tolist(),
    )
