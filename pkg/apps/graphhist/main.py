"""
Command-line entry point: ``graphhist <command> [flags]``.

Commands: train, cv, eval, gradcheck, synth, stats, replay.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from graphhist import __version__
from graphhist.config import settings
from graphhist.data import (
    GraphDataset,
    NodeFeatureSource,
    SynthKind,
    dataset_stats,
    load_tu_dataset,
    split_folds,
    synth_dataset,
    write_tu_dataset,
)
from graphhist.exceptions import GraphHistError
from graphhist.models import (
    PRESETS,
    EvalProtocol,
    ModelConfig,
    RunCommand,
    RunConfig,
    RunManifest,
    StopMetric,
    TrainConfig,
)
from graphhist.network import GraphHistNetwork, load_checkpoint, save_checkpoint
from graphhist.services import (
    GraphCache,
    cross_validate,
    evaluate,
    run_fold,
    run_gradcheck_suite,
)
from graphhist.utils.logger import get_logger, set_level
from graphhist.utils.storage import (
    create_run_directory,
    resolve_dataset_directory,
    write_csv,
    write_json,
)

logger = get_logger(__name__)

HISTORY_HEADER = ["epoch", "lr", "train_loss", "eval_loss", "eval_accuracy", "eval_f1"]

# flag -> ModelConfig field
MODEL_FLAGS = {"k": "k", "h": "h", "u": "u", "dropout": "dropout", "alpha": "alpha"}
# flag -> TrainConfig field
TRAIN_FLAGS = {
    "lr": "lr",
    "batch": "batch_size",
    "epochs": "max_epochs",
    "seed": "seed",
    "stop_metric": "stop_metric",
    "eval_protocol": "eval_protocol",
    "momentum": "momentum",
    "weight_decay": "weight_decay",
    "positive_class": "positive_class",
}


def _default(model, field: str) -> Any:
    value = model.model_fields[field].default
    return value.value if hasattr(value, "value") else value


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--dataset", required=True, help="directory holding the TU dataset files"
    )
    parser.add_argument(
        "--name",
        default=None,
        help="TU file prefix ({name}_A.txt, ...); defaults to the directory name",
    )
    parser.add_argument(
        "--node-features",
        choices=[source.value for source in NodeFeatureSource],
        default=NodeFeatureSource.DEFAULT.value,
        help="node feature source (default: %(default)s)",
    )


def _add_model_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--preset", choices=sorted(PRESETS), default=None, help="published per-dataset settings"
    )
    parser.add_argument(
        "--k", type=int, default=None, help=f"histogram bins (default: {_default(ModelConfig, 'k')})"
    )
    parser.add_argument(
        "--h", type=int, default=None, help=f"largest Laplacian power (default: {_default(ModelConfig, 'h')})"
    )
    parser.add_argument(
        "--u", type=int, default=None, help=f"width per power branch (default: {_default(ModelConfig, 'u')})"
    )
    parser.add_argument(
        "--dropout", type=float, default=None, help=f"dropout rate (default: {_default(ModelConfig, 'dropout')})"
    )
    parser.add_argument(
        "--alpha", type=float, default=None, help=f"binning sharpness (default: {settings.BIN_ALPHA})"
    )
    parser.add_argument(
        "--normalize-histogram", action="store_true", help="divide bin counts by the node count"
    )


def _add_train_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed", type=int, default=None, help=f"random seed (default: {settings.DEFAULT_SEED})"
    )
    parser.add_argument(
        "--epochs", type=int, default=None, help=f"max epochs (default: {_default(TrainConfig, 'max_epochs')})"
    )
    parser.add_argument(
        "--batch", type=int, default=None, help=f"mini-batch size (default: {_default(TrainConfig, 'batch_size')})"
    )
    parser.add_argument(
        "--lr", type=float, default=None, help=f"initial learning rate (default: {_default(TrainConfig, 'lr')})"
    )
    parser.add_argument(
        "--momentum", type=float, default=None, help="SGD momentum (default: 0)"
    )
    parser.add_argument(
        "--weight-decay", type=float, default=None, help="L2 weight decay (default: 0)"
    )
    parser.add_argument(
        "--oversample", action="store_true", help="oversample minority classes in training"
    )
    parser.add_argument(
        "--stop-metric",
        choices=[metric.value for metric in StopMetric],
        default=None,
        help=f"early-stopping metric (default: {StopMetric.LOSS.value})",
    )
    parser.add_argument(
        "--eval-protocol",
        choices=[protocol.value for protocol in EvalProtocol],
        default=None,
        help=f"split driving the schedule (default: {EvalProtocol.HELD_OUT_VAL.value})",
    )
    parser.add_argument(
        "--positive-class", type=int, default=None, help="class scored by precision/recall/F1 (default: 1)"
    )
    parser.add_argument(
        "--no-early-stopping", action="store_true", help="always run --epochs epochs"
    )
    parser.add_argument(
        "--folds", type=int, default=10, help="number of stratified folds (default: %(default)s)"
    )
    parser.add_argument("--out", default=None, help="output directory (default: under GRAPHHIST_OUTPUT_DIR)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.APP_NAME,
        description="Graph classification with histogram-binned GCN embeddings",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level", default=None, help=f"logging level (default: {settings.LOG_LEVEL})"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser("train", help="train one model on one fold")
    _add_dataset_args(train)
    _add_model_args(train)
    _add_train_args(train)
    train.add_argument(
        "--fold", type=int, default=0, help="fold used as the test set (default: %(default)s)"
    )
    train.set_defaults(func=cmd_train)

    cv = commands.add_parser("cv", help="k-fold cross-validation")
    _add_dataset_args(cv)
    _add_model_args(cv)
    _add_train_args(cv)
    cv.add_argument("--workers", type=int, default=1, help="parallel fold processes (default: %(default)s)")
    cv.set_defaults(func=cmd_cv)

    ev = commands.add_parser("eval", help="score a dataset with a checkpoint")
    _add_dataset_args(ev)
    ev.add_argument("--checkpoint", required=True, help="checkpoint.npz written by train")
    for flag in ("k", "h", "u"):
        ev.add_argument(f"--{flag}", type=int, default=None, help="expected value; rejects a mismatch")
    for flag in ("dropout", "alpha"):
        ev.add_argument(f"--{flag}", type=float, default=None, help="expected value; rejects a mismatch")
    ev.add_argument("--split", default=None, help="split.json of a train run")
    ev.add_argument(
        "--subset",
        choices=["train", "eval", "test"],
        default="test",
        help="subset of --split to score (default: %(default)s)",
    )
    ev.add_argument("--batch", type=int, default=_default(TrainConfig, "batch_size"))
    ev.add_argument("--positive-class", type=int, default=1)
    ev.add_argument("--dump-histograms", default=None, help="write one k x C CSV per graph here")
    ev.add_argument("--out", default=None, help="output directory")
    ev.set_defaults(func=cmd_eval)

    grad = commands.add_parser("gradcheck", help="finite-difference check of every kernel")
    grad.add_argument("--cases", type=int, default=20, help="random cases per kernel (default: %(default)s)")
    grad.add_argument(
        "--oracle-instances", type=int, default=1000, help="binning oracle instances (default: %(default)s)"
    )
    grad.add_argument("--seed", type=int, default=0)
    grad.add_argument("--inject-fault", default=None, metavar="KERNEL", help="negate a kernel's backward")
    grad.add_argument("--out", default=None, help="write the JSON report to this file")
    grad.set_defaults(func=cmd_gradcheck)

    synth = commands.add_parser("synth", help="write a synthetic dataset in TU format")
    synth.add_argument(
        "--kind",
        choices=[kind.value for kind in SynthKind],
        default=SynthKind.STARS_VS_CYCLES.value,
    )
    synth.add_argument("--count", type=int, default=40)
    synth.add_argument("--min-nodes", type=int, default=6)
    synth.add_argument("--max-nodes", type=int, default=12)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--name", default=None, help="TU file prefix (default: the kind)")
    synth.add_argument("--out", required=True, help="directory to write")
    synth.set_defaults(func=cmd_synth)

    stats = commands.add_parser("stats", help="print dataset size statistics")
    _add_dataset_args(stats)
    stats.add_argument("--json", action="store_true", help="print JSON instead of text")
    stats.set_defaults(func=cmd_stats)

    replay = commands.add_parser("replay", help="rerun the command recorded in a manifest")
    replay.add_argument("--manifest", required=True, help="manifest.json of an earlier run")
    replay.add_argument("--out", default=None, help="output directory for the rerun")
    replay.set_defaults(func=cmd_replay)
    return parser


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _load_dataset(path: str, name: Optional[str], node_features: str) -> GraphDataset:
    directory = Path(path)
    name = name or directory.resolve().name
    return load_tu_dataset(directory, name, NodeFeatureSource(node_features))


def build_configs(args: argparse.Namespace, dataset: GraphDataset) -> Tuple[ModelConfig, TrainConfig]:
    """
    Merge defaults, the optional preset and explicit flags, in that order.
    """
    model: Dict[str, Any] = {
        "alpha": settings.BIN_ALPHA,
        "num_classes": dataset.num_classes,
        "num_features": dataset.num_features,
        "normalize_histogram": args.normalize_histogram,
    }
    train: Dict[str, Any] = {"seed": settings.DEFAULT_SEED, "oversample": args.oversample}
    if args.preset:
        preset = PRESETS[args.preset]
        model.update(k=preset.k, h=preset.h, u=preset.u, dropout=preset.dropout)
        train["oversample"] = train["oversample"] or preset.oversample
        train["stop_metric"] = preset.stop_metric
    for flag, field in MODEL_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            model[field] = value
    for flag, field in TRAIN_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            train[field] = value
    if args.no_early_stopping:
        train["early_stopping"] = False
    return ModelConfig(**model), TrainConfig(**train)


def _history_rows(history) -> List[List[Any]]:
    return [
        [r.epoch, r.lr, r.train_loss, r.eval_loss, r.eval_accuracy, "" if r.eval_f1 is None else r.eval_f1]
        for r in history
    ]


def _write_manifest(
    command: RunCommand,
    run_config: RunConfig,
    dataset: GraphDataset,
    dataset_path: str,
    out_dir: Path,
    options: Dict[str, Any],
) -> RunManifest:
    manifest = RunManifest(
        command=command,
        config=run_config,
        seed=run_config.train.seed,
        dataset_path=str(Path(dataset_path).resolve()),
        dataset_name=dataset.name,
        output_dir=str(out_dir),
        code_version=__version__,
        options=options,
    )
    write_json(out_dir / "manifest.json", manifest)
    return manifest


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def run_train(
    dataset: GraphDataset,
    dataset_path: str,
    model_config: ModelConfig,
    train_config: TrainConfig,
    options: Dict[str, Any],
    out: Optional[str],
) -> Path:
    """Train on one fold and write manifest, split, history, checkpoint and metrics."""
    out_dir = create_run_directory("train", dataset.name, out)
    run_config = RunConfig(model=model_config, train=train_config)
    _write_manifest(RunCommand.TRAIN, run_config, dataset, dataset_path, out_dir, options)

    fold = options.get("fold", 0)
    plan = split_folds(dataset, options.get("folds", 10), train_config.seed)
    if not 0 <= fold < len(plan):
        raise ValueError(f"fold {fold} outside 0..{len(plan) - 1}")
    train_indices, test_indices = plan[fold]
    run = run_fold(dataset, train_indices, test_indices, model_config, train_config, fold)
    fit_indices = np.setdiff1d(train_indices, run.eval_indices)

    write_json(
        out_dir / "split.json",
        {
            "train": fit_indices.tolist(),
            "eval": run.eval_indices.tolist(),
            "test": run.test_indices.tolist(),
        },
    )
    write_csv(out_dir / "history.csv", HISTORY_HEADER, _history_rows(run.trained.history))
    save_checkpoint(out_dir / "checkpoint.npz", model_config, run.trained.params)
    write_json(
        out_dir / "metrics.json",
        {
            "best_epoch": run.trained.best_epoch,
            "epochs": len(run.trained.history),
            "eval": run.trained.metrics.model_dump(),
            "eval_loss": run.trained.eval_loss,
            "test": run.test_metrics.model_dump(),
        },
    )
    print(
        f"fold {fold}: test accuracy {run.test_metrics.accuracy:.4f}, "
        f"eval accuracy {run.trained.metrics.accuracy:.4f} (best epoch {run.trained.best_epoch})"
    )
    print(f"artifacts in {out_dir}")
    return out_dir


def run_cv(
    dataset: GraphDataset,
    dataset_path: str,
    model_config: ModelConfig,
    train_config: TrainConfig,
    options: Dict[str, Any],
    out: Optional[str],
) -> Path:
    """Cross-validate and write manifest, per-fold histories, folds.csv and summary.json."""
    out_dir = create_run_directory("cv", dataset.name, out)
    run_config = RunConfig(model=model_config, train=train_config)
    _write_manifest(RunCommand.CV, run_config, dataset, dataset_path, out_dir, options)

    runs, summary = cross_validate(
        dataset,
        model_config,
        train_config,
        n_folds=options.get("folds", 10),
        workers=options.get("workers", 1),
    )
    for run in runs:
        write_csv(
            out_dir / f"history_fold{run.fold}.csv",
            HISTORY_HEADER,
            _history_rows(run.trained.history),
        )
    write_csv(
        out_dir / "folds.csv",
        ["fold", "accuracy", "precision", "recall", "f1", "best_epoch", "epochs"],
        [
            [f.fold, f.accuracy, f.precision, f.recall, f.f1, f.best_epoch, f.epochs]
            for f in summary.folds
        ],
    )
    write_json(out_dir / "summary.json", summary)
    print(f"{dataset.name}: {summary.formatted()}")
    print(f"artifacts in {out_dir}")
    return out_dir


def _options(args: argparse.Namespace, *names: str) -> Dict[str, Any]:
    return {name: getattr(args, name) for name in names}


def cmd_train(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.dataset, args.name, args.node_features)
    model_config, train_config = build_configs(args, dataset)
    options = _options(args, "name", "node_features", "fold", "folds")
    run_train(dataset, args.dataset, model_config, train_config, options, args.out)
    return 0


def cmd_cv(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.dataset, args.name, args.node_features)
    model_config, train_config = build_configs(args, dataset)
    options = _options(args, "name", "node_features", "folds", "workers")
    run_cv(dataset, args.dataset, model_config, train_config, options, args.out)
    return 0


def _eval_indices(args: argparse.Namespace, dataset: GraphDataset) -> List[int]:
    if args.split is None:
        return list(range(len(dataset)))
    split_path = Path(args.split)
    if not split_path.is_file():
        raise FileNotFoundError(f"split file not found: {split_path}")
    split = json.loads(split_path.read_text(encoding="utf-8"))
    indices = [int(i) for i in split[args.subset]]
    if any(not 0 <= i < len(dataset) for i in indices):
        raise ValueError(f"{split_path} indexes graphs outside the dataset")
    return indices


def cmd_eval(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.dataset, args.name, args.node_features)
    stored, _ = load_checkpoint(args.checkpoint)
    overrides = {
        "num_features": dataset.num_features,
        "num_classes": dataset.num_classes,
    }
    for flag, field in MODEL_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            overrides[field] = value
    expected = stored.model_copy(update=overrides)
    config, params = load_checkpoint(args.checkpoint, expected=expected)

    indices = _eval_indices(args, dataset)
    network = GraphHistNetwork(config, params)
    cache = GraphCache(dataset)
    result = evaluate(network, cache, indices, args.batch, args.positive_class)

    out_dir = create_run_directory("eval", dataset.name, args.out)
    write_json(out_dir / "metrics.json", result.metrics)
    write_csv(
        out_dir / "probabilities.csv",
        ["index", "label", "prediction"] + [f"p{c}" for c in range(config.num_classes)],
        [
            [index, int(dataset.labels[index]), int(prediction), *row.tolist()]
            for index, prediction, row in zip(indices, result.predictions, result.probabilities)
        ],
    )
    if args.dump_histograms:
        dump_histograms(network, cache, indices, args.batch, Path(args.dump_histograms))
    print(json.dumps(result.metrics.model_dump(), indent=2))
    print(f"artifacts in {out_dir}")
    return 0


def dump_histograms(
    network: GraphHistNetwork,
    cache: GraphCache,
    indices: Sequence[int],
    batch_size: int,
    directory: Path,
) -> None:
    """One comma-separated k x C file per graph."""
    directory.mkdir(parents=True, exist_ok=True)
    for chunk, batch in cache.batches(list(indices), batch_size):
        result = network.forward(batch, train_mode=False)
        for index, histogram in zip(chunk, result.histograms):
            np.savetxt(directory / f"graph_{index}.csv", histogram, delimiter=",", fmt="%.10g")
    logger.info(f"Wrote {len(indices)} histograms to {directory}")


def cmd_gradcheck(args: argparse.Namespace) -> int:
    report = run_gradcheck_suite(
        cases=args.cases,
        oracle_instances=args.oracle_instances,
        seed=args.seed,
        inject_fault=args.inject_fault,
    )
    print(f"{'kernel':<24}{'max rel. err':>14}{'tolerance':>12}  status")
    for entry in report.entries:
        status = "PASS" if entry.passed else "FAIL"
        print(f"{entry.kernel:<24}{entry.max_rel_error:>14.3e}{entry.tolerance:>12.1e}  {status}")
    if args.out:
        write_json(args.out, report)
    if not report.passed:
        message = f"gradient check failed for: {', '.join(report.failures())}"
        logger.error(message)
        print(message, file=sys.stderr)
        return 1
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    dataset = synth_dataset(args.kind, args.count, (args.min_nodes, args.max_nodes), args.seed)
    name = args.name or args.kind
    write_tu_dataset(dataset, args.out, name)
    print(f"wrote {len(dataset)} graphs to {Path(args.out).resolve()} as {name}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    dataset = _load_dataset(args.dataset, args.name, args.node_features)
    stats = dataset_stats(dataset)
    if args.json:
        print(stats.model_dump_json(indent=2))
    else:
        print(f"{stats.name}: {stats.graphs} graphs, {stats.classes} classes")
        print(f"  mean nodes {stats.mean_nodes:.2f}, mean edges {stats.mean_edges:.2f}")
        print(f"  class counts {stats.class_counts}")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    path = Path(args.manifest)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    manifest = RunManifest.model_validate_json(path.read_text(encoding="utf-8"))
    if manifest.code_version != __version__:
        logger.warning(
            f"manifest was written by version {manifest.code_version}, running {__version__}"
        )
    options = manifest.options
    dataset = _load_dataset(
        manifest.dataset_path,
        options.get("name"),
        options.get("node_features", NodeFeatureSource.DEFAULT.value),
    )
    model_config, train_config = manifest.config.model, manifest.config.train
    if manifest.command is RunCommand.TRAIN:
        run_train(dataset, manifest.dataset_path, model_config, train_config, options, args.out)
    else:
        run_cv(dataset, manifest.dataset_path, model_config, train_config, options, args.out)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.log_level:
            set_level(args.log_level)
        if getattr(args, "dataset", None):
            args.dataset = str(resolve_dataset_directory(args.dataset))
        return args.func(args)
    except (GraphHistError, ValidationError, ValueError, FileNotFoundError) as e:
        logger.error(f"{args.command} failed: {e}", exc_info=settings.DEBUG)
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
