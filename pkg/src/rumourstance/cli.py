"""Command-line pipeline: ingest, train, predict, eval, ablate, grid, balance.

Datasets are given as a directory in the official layout plus a key file
(``--train DIR --train-key FILE``) or as a flat ``.jsonl`` file
(``--train FILE``). Machine-readable outputs are written with sorted keys and
without timings so that identical inputs give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .corpus import CorpusError, Dataset, StanceLabel, class_counts, load_flat, load_semeval, merge, write_flat
from .evaluation import (
    EvaluationError,
    ablation_to_json,
    evaluate,
    fit,
    format_ablation,
    grid_search,
    run_ablation,
    run_balanced,
)
from .features import CONFIGS, FeatureError, build_matrix, build_unlabeled, get_config
from .lexicons import LEXICON_ENV, LexiconError, LexiconRegistry
from .svm import KernelSpec, SVMError, TrainParams, load, save

logger = logging.getLogger("rumourstance")

EXIT_ERROR = 1


class CLIError(Exception):
    pass


def _load_dataset(path: str | None, key: str | None, split: str) -> Dataset:
    if path is None:
        raise CLIError(f"--{split} is required for this command")
    p = Path(path)
    if not p.exists():
        raise CLIError(f"{path}: no such file or directory")
    if p.is_dir():
        return load_semeval(p, key, split=split)
    if key is not None:
        raise CLIError(f"--{split}-key only applies to directory datasets")
    return load_flat(p, split=split)


def _registry(args) -> LexiconRegistry:
    path = args.lexicons or os.environ.get(LEXICON_ENV)
    registry = LexiconRegistry.from_directory(path) if path else LexiconRegistry()
    absent = registry.missing(("emolex", "emosn", "dal", "anew", "liwc"))
    if absent:
        runnable = [name for name, cfg in CONFIGS.items() if not registry.missing(cfg.resources)]
        logger.warning("lexicons not available: %s; runnable feature configs: %s",
                       ", ".join(absent), ", ".join(runnable))
    return registry


def _params(args) -> TrainParams:
    kernel = KernelSpec(args.kernel, args.gamma, args.degree, args.coef0)
    weights = None if args.class_weight == "none" else "balanced"
    return TrainParams(C=args.C, kernel=kernel, class_weights=weights, tol=args.tol)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def _train_split(args) -> Dataset:
    train = _load_dataset(args.train, args.train_key, "train")
    if getattr(args, "merge_dev", False):
        train = merge(train, _load_dataset(args.dev, args.dev_key, "dev"), split="train")
    return train


# -- subcommands -------------------------------------------------------------


def cmd_ingest(args) -> None:
    data = _load_dataset(args.data, args.key, "data")
    counts = class_counts(data)
    summary = {
        "threads": len(data.threads),
        "tweets": data.n_tweets,
        "labeled": sum(counts.values()),
        "class_counts": {label.value: n for label, n in counts.items()},
    }
    if args.write_flat:
        write_flat(data, args.write_flat)
    _write(args.out, json.dumps(summary, indent=1, sort_keys=True))


def cmd_train(args) -> None:
    config = get_config(args.config)
    registry = _registry(args)
    model = fit(_train_split(args), registry, config, _params(args), workers=args.workers)
    save(model, args.out)
    schema_path = Path(str(args.out) + ".schema.json")
    with open(schema_path, "w", encoding="utf-8") as fh:
        json.dump({"config": config.name, "schema": list(config.schema)}, fh, indent=1)
        fh.write("\n")
    logger.info("model written to %s (%d features)", args.out, config.dimension)


def cmd_predict(args) -> None:
    model = load(args.model)
    config = get_config(model.config_name or args.config)
    registry = _registry(args)
    data = _load_dataset(args.data, args.key, "data")
    if any(t.label is not None for t, _ in data.iter_tweets()) and not args.all_tweets:
        X, _, ids = build_matrix(data, registry, config)
    else:
        X, ids = build_unlabeled(data, registry, config)
    lines = []
    if len(ids):
        D = model.decision_matrix(X)
        votes, margins = model.vote(D)
        labels = model.predict(X)
        for tid, label, v, m in zip(ids, labels, votes, margins):
            summary = {
                "votes": {c.value: int(n) for c, n in zip(model.classes, v)},
                "margin": {c.value: round(float(x), 6) for c, x in zip(model.classes, m)},
            }
            lines.append(json.dumps({"id": tid, "label": label.value, "decision_summary": summary},
                                    sort_keys=True))
    _write(args.out, "\n".join(lines))


def _read_predictions(path: str) -> dict[str, StanceLabel]:
    preds = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                preds[str(rec["id"])] = StanceLabel.parse(rec["label"])
            except (json.JSONDecodeError, KeyError) as exc:
                raise CLIError(f"{path}:{lineno}: bad prediction line ({exc})") from None
    return preds


def cmd_eval(args) -> None:
    data = _load_dataset(args.data, args.key, "data")
    if args.predictions:
        preds = _read_predictions(args.predictions)
        gold, pred = [], []
        for tweet, _ in data.instances():
            if tweet.id not in preds:
                raise CLIError(f"no prediction for tweet {tweet.id}")
            gold.append(tweet.label)
            pred.append(preds[tweet.id])
        report = evaluate(gold, pred, config="predictions")
    elif args.model:
        model = load(args.model)
        config = get_config(model.config_name or args.config)
        X, gold, _ = build_matrix(data, _registry(args), config)
        report = evaluate(gold, model.predict(X), config=config.name,
                          params=model.params.describe())
    else:
        raise CLIError("eval needs --predictions or --model")
    print(report.format(), file=sys.stderr)
    _write(args.out, report.to_json(runtime=False))


def cmd_ablate(args) -> None:
    rows = run_ablation(_train_split(args), _load_dataset(args.test, args.test_key, "test"),
                        _registry(args), _params(args), workers=args.workers)
    print(format_ablation(rows), file=sys.stderr)
    _write(args.out, ablation_to_json(rows, runtime=False))


def cmd_grid(args) -> None:
    result = grid_search(
        _load_dataset(args.train, args.train_key, "train"),
        _load_dataset(args.dev, args.dev_key, "dev"),
        _registry(args), get_config(args.config), _params(args),
        criterion=args.criterion, workers=args.workers,
    )
    print(result.format(), file=sys.stderr)
    _write(args.out, result.to_json(runtime=False))


def cmd_balance(args) -> None:
    report = run_balanced(
        _train_split(args), _load_dataset(args.test, args.test_key, "test"),
        _registry(args), get_config(args.config), _params(args), seed=args.seed,
        train_per_class=args.train_per_class, test_per_class=args.test_per_class,
    )
    print(report.format(), file=sys.stderr)
    _write(args.out, report.to_json(runtime=False))


# -- parser ----------------------------------------------------------------


def _add_split(p: argparse.ArgumentParser, split: str, help_: str) -> None:
    p.add_argument(f"--{split}", metavar="PATH", help=help_)
    p.add_argument(f"--{split}-key", metavar="FILE", help=f"label key file for a directory --{split}")


def _add_model_opts(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("classifier")
    g.add_argument("--config", default="BEST17", choices=sorted(CONFIGS), type=str.upper,
                   help="feature configuration (default: BEST17)")
    g.add_argument("--kernel", default="rbf", choices=("linear", "rbf", "polynomial", "sigmoid"))
    g.add_argument("-C", "--C", dest="C", type=float, default=1.0, help="penalty parameter (default: 1)")
    g.add_argument("--gamma", type=float, default=None, help="kernel gamma (default: 1/n_features)")
    g.add_argument("--degree", type=int, default=3, help="polynomial degree (default: 3)")
    g.add_argument("--coef0", type=float, default=0.0)
    g.add_argument("--class-weight", choices=("none", "balanced"), default="none")
    g.add_argument("--tol", type=float, default=1e-3, help="SMO stopping tolerance (default: 1e-3)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rumourstance", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lexicons", metavar="DIR",
                        help=f"lexicon directory (default: ${LEXICON_ENV})")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                        help="parallel worker processes (default: number of cores)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("-o", "--out", metavar="FILE", help="output file (default: stdout)")
    common.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="load a dataset and print class counts")
    p.add_argument("--data", required=True, metavar="PATH")
    p.add_argument("--key", metavar="FILE")
    p.add_argument("--write-flat", metavar="FILE", help="also write the dataset as JSONL")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", parents=[common], help="train a model")
    _add_split(p, "train", "training data")
    _add_split(p, "dev", "development data (used with --merge-dev)")
    p.add_argument("--merge-dev", action="store_true", help="train on train + dev")
    _add_model_opts(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="label tweets with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, metavar="PATH")
    p.add_argument("--key", metavar="FILE")
    p.add_argument("--all-tweets", action="store_true",
                   help="predict every tweet, not only labeled ones")
    p.add_argument("--config", default="BEST17", type=str.upper, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", parents=[common], help="score predictions or a model against gold labels")
    p.add_argument("--data", required=True, metavar="PATH")
    p.add_argument("--key", metavar="FILE")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--predictions", metavar="FILE", help="JSONL written by `predict`")
    src.add_argument("--model")
    p.add_argument("--config", default="BEST17", type=str.upper, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", parents=[common], help="feature-set ablation A..K")
    _add_split(p, "train", "training data")
    _add_split(p, "dev", "development data (used with --merge-dev)")
    _add_split(p, "test", "test data")
    p.add_argument("--merge-dev", action="store_true")
    _add_model_opts(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("grid", parents=[common], help="C x kernel x weighting search on dev")
    _add_split(p, "train", "training data")
    _add_split(p, "dev", "development data")
    p.add_argument("--criterion", choices=("accuracy", "macro_f1"), default="accuracy")
    _add_model_opts(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("balance", parents=[common], help="train and test on class-balanced samples")
    _add_split(p, "train", "training data")
    _add_split(p, "dev", "development data (used with --merge-dev)")
    _add_split(p, "test", "test data")
    p.add_argument("--merge-dev", action="store_true")
    p.add_argument("--train-per-class", type=int, default=330)
    p.add_argument("--test-per-class", type=int, default=71)
    _add_model_opts(p)
    p.set_defaults(func=cmd_balance)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except (CLIError, CorpusError, LexiconError, FeatureError, SVMError, EvaluationError,
            OSError, KeyError) as exc:
        print(f"rumourstance {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
