from .cross_validation import FoldRun, cross_validate, resolve_eval_split, run_fold, summarize
from .early_stopping import best_epoch, early_stop
from .gradcheck_suite import run_gradcheck_suite
from .metrics import compute_metrics, f1_from_precision_recall
from .optim import SGD, PlateauScheduler, SchedulerState, scheduler_update, sgd_step
from .trainer import EvaluationResult, GraphCache, TrainedFold, evaluate, train_fold

__all__ = [
    "SGD",
    "EvaluationResult",
    "FoldRun",
    "GraphCache",
    "PlateauScheduler",
    "SchedulerState",
    "TrainedFold",
    "best_epoch",
    "compute_metrics",
    "cross_validate",
    "early_stop",
    "evaluate",
    "f1_from_precision_recall",
    "resolve_eval_split",
    "run_fold",
    "run_gradcheck_suite",
    "scheduler_update",
    "sgd_step",
    "summarize",
    "train_fold",
]
