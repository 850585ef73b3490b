"""Metrics, confusion matrices and the experiment runners.

Confusion matrices are 4x4 with rows = gold and columns = predicted, in the
fixed label order support, deny, query, comment.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .corpus import LABELS, Dataset, StanceLabel, balanced_subset
from .features import (
    ABLATION_CONFIGS,
    FeatureConfig,
    build_matrix,
    get_config,
    validate_registry,
)
from .lexicons import LexiconRegistry
from .svm import KERNELS, KernelSpec, StanceModel, TrainParams, train_multiclass

logger = logging.getLogger(__name__)

C_GRID = (0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)
KERNEL_GRID = KERNELS
WEIGHT_GRID = (None, "balanced")


class EvaluationError(ValueError):
    pass


def confusion(gold: Sequence[StanceLabel], pred: Sequence[StanceLabel]) -> np.ndarray:
    if len(gold) != len(pred):
        raise EvaluationError(f"{len(gold)} gold labels but {len(pred)} predictions")
    if not gold:
        raise EvaluationError("nothing to evaluate")
    index = {label: i for i, label in enumerate(LABELS)}
    cm = np.zeros((len(LABELS), len(LABELS)), dtype=int)
    for g, p in zip(gold, pred):
        cm[index[StanceLabel(g)], index[StanceLabel(p)]] += 1
    return cm


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


@dataclass
class EvalReport:
    confusion: np.ndarray
    accuracy: float
    precision: dict[StanceLabel, float]
    recall: dict[StanceLabel, float]
    f1: dict[StanceLabel, float]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    config: str = ""
    params: dict = field(default_factory=dict)
    runtime: float = 0.0

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "params": self.params,
            "labels": [label.value for label in LABELS],
            "confusion": self.confusion.tolist(),
            "accuracy": self.accuracy,
            "per_class": {
                label.value: {
                    "precision": self.precision[label],
                    "recall": self.recall[label],
                    "f1": self.f1[label],
                }
                for label in LABELS
            },
            "macro": {
                "precision": self.macro_precision,
                "recall": self.macro_recall,
                "f1": self.macro_f1,
            },
            "runtime": round(self.runtime, 3),
        }

    def to_json(self, runtime: bool = True) -> str:
        d = self.to_dict()
        if not runtime:
            d.pop("runtime")
        return json.dumps(d, indent=1, sort_keys=True)

    def format(self) -> str:
        head = "gold\\pred " + " ".join(f"{l.short:>5}" for l in LABELS)
        rows = [head]
        for label, row in zip(LABELS, self.confusion):
            rows.append(f"{label.value:<9} " + " ".join(f"{v:>5d}" for v in row))
        rows.append("")
        rows.append(f"accuracy {self.accuracy:.4f}   macro P {self.macro_precision:.3f}"
                    f"  R {self.macro_recall:.3f}  F1 {self.macro_f1:.3f}")
        for label in LABELS:
            rows.append(f"  {label.value:<8} P {self.precision[label]:.3f}  R {self.recall[label]:.3f}"
                        f"  F1 {self.f1[label]:.3f}")
        return "\n".join(rows)


def metrics(cm: np.ndarray, config: str = "", params: dict | None = None) -> EvalReport:
    cm = np.asarray(cm)
    total = int(cm.sum())
    if total <= 0:
        raise EvaluationError("empty confusion matrix")
    precision, recall, f1 = {}, {}, {}
    for k, label in enumerate(LABELS):
        tp = cm[k, k]
        p = _safe_div(tp, cm[:, k].sum())
        r = _safe_div(tp, cm[k, :].sum())
        precision[label], recall[label] = p, r
        f1[label] = _safe_div(2 * p * r, p + r)
    return EvalReport(
        confusion=cm,
        accuracy=np.trace(cm) / total,
        precision=precision,
        recall=recall,
        f1=f1,
        macro_precision=float(np.mean(list(precision.values()))),
        macro_recall=float(np.mean(list(recall.values()))),
        macro_f1=float(np.mean(list(f1.values()))),
        config=config,
        params=params or {},
    )


def evaluate(gold: Sequence[StanceLabel], pred: Sequence[StanceLabel], **kw) -> EvalReport:
    return metrics(confusion(gold, pred), **kw)


# -- train / test runs -----------------------------------------------------


def fit(train: Dataset, registry: LexiconRegistry, config: FeatureConfig,
        params: TrainParams, workers: int = 1) -> StanceModel:
    validate_registry(registry, config)
    X, y, _ = build_matrix(train, registry, config)
    if len(X) == 0:
        raise EvaluationError("training split has no labeled instances")
    return train_multiclass(X, y, params, schema=config.schema, config_name=config.name,
                            workers=workers)


def train_and_evaluate(train: Dataset, test: Dataset, registry: LexiconRegistry,
                       config: FeatureConfig, params: TrainParams) -> EvalReport:
    start = time.perf_counter()
    model = fit(train, registry, config, params)
    X, gold, _ = build_matrix(test, registry, config)
    report = evaluate(gold, model.predict(X), config=config.name,
                      params=model.params.describe())
    report.runtime = time.perf_counter() - start
    return report


@dataclass
class AblationRow:
    config: str
    dimension: int
    report: EvalReport | None
    skipped: str | None = None


def _ablation_job(args):
    train, test, registry, config, params = args
    return train_and_evaluate(train, test, registry, config, params)


def run_ablation(train: Dataset, test: Dataset, registry: LexiconRegistry,
                 params: TrainParams = TrainParams(),
                 configs: Sequence[str] = ABLATION_CONFIGS, workers: int = 1) -> list[AblationRow]:
    """Train and test once per feature set A..K with identical SVM settings.

    A row whose lexicons are not loaded is skipped with a notice rather than
    filled with zero features.
    """
    rows: list[AblationRow] = []
    jobs = []
    for name in configs:
        config = get_config(name)
        missing = registry.missing(config.resources)
        if missing:
            msg = f"lexicons not loaded: {', '.join(missing)}"
            logger.warning("ablation row %s skipped (%s)", name, msg)
            rows.append(AblationRow(name, config.dimension, None, msg))
        else:
            rows.append(AblationRow(name, config.dimension, None))
            jobs.append((len(rows) - 1, (train, test, registry, config, params)))
    for idx, report in zip([i for i, _ in jobs], _map(_ablation_job, [j for _, j in jobs], workers)):
        rows[idx].report = report
    return rows


def _map(fn, items, workers: int):
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def format_ablation(rows: Sequence[AblationRow]) -> str:
    lines = [f"{'set':<4}{'dim':>4}  {'acc':>6} {'P':>6} {'R':>6} {'F1':>6}   "
             + "  ".join(f"{l.short}:P/R/F1" for l in LABELS if l is not StanceLabel.DENY)]
    for row in rows:
        if row.report is None:
            lines.append(f"{row.config:<4}{row.dimension:>4}  skipped ({row.skipped})")
            continue
        r = row.report
        per = "  ".join(f"{r.precision[l]:.2f}/{r.recall[l]:.2f}/{r.f1[l]:.2f}"
                        for l in LABELS if l is not StanceLabel.DENY)
        lines.append(f"{row.config:<4}{row.dimension:>4}  {r.accuracy:6.3f} {r.macro_precision:6.2f} "
                     f"{r.macro_recall:6.2f} {r.macro_f1:6.2f}   {per}")
    return "\n".join(lines)


def ablation_to_json(rows: Sequence[AblationRow], runtime: bool = True) -> str:
    out = []
    for row in rows:
        entry = {"set": row.config, "dimension": row.dimension, "skipped": row.skipped,
                 "report": None}
        if row.report is not None:
            entry["report"] = row.report.to_dict()
            if not runtime:
                entry["report"].pop("runtime")
        out.append(entry)
    return json.dumps(out, indent=1, sort_keys=True)


# -- grid search -----------------------------------------------------------


def grid_params(base: TrainParams = TrainParams()) -> list[TrainParams]:
    """C x kernel x weighting, in enumeration order (56 candidates)."""
    out = []
    for c in C_GRID:
        for kind in KERNEL_GRID:
            for weighting in WEIGHT_GRID:
                kernel = KernelSpec(kind, base.kernel.gamma, base.kernel.degree, base.kernel.coef0)
                out.append(replace(base, C=c, kernel=kernel, class_weights=weighting))
    return out


@dataclass
class GridCell:
    params: TrainParams
    report: EvalReport | None
    error: str | None = None

    def score(self, criterion: str) -> float:
        if self.report is None:
            return -np.inf
        return self.report.accuracy if criterion == "accuracy" else self.report.macro_f1


@dataclass
class GridResult:
    best: TrainParams
    cells: list[GridCell]
    criterion: str

    def to_json(self, runtime: bool = True) -> str:
        cells = []
        for cell in self.cells:
            rep = None
            if cell.report is not None:
                rep = cell.report.to_dict()
                if not runtime:
                    rep.pop("runtime")
            cells.append({"params": cell.params.describe(), "error": cell.error, "report": rep})
        return json.dumps({"criterion": self.criterion, "best": self.best.describe(),
                           "cells": cells}, indent=1, sort_keys=True)

    def format(self) -> str:
        lines = [f"{'C':>8} {'kernel':<11}{'weights':<9} {'acc':>6} {'macroF1':>8}"]
        for cell in self.cells:
            p = cell.params
            w = _weights_label(p.class_weights)
            if cell.report is None:
                lines.append(f"{p.C:>8g} {p.kernel.kind:<11}{w:<9} failed: {cell.error}")
            else:
                lines.append(f"{p.C:>8g} {p.kernel.kind:<11}{w:<9} {cell.report.accuracy:6.3f} "
                             f"{cell.report.macro_f1:8.3f}")
        b = self.best
        lines.append(f"best: C={b.C:g} kernel={b.kernel.kind} weights={_weights_label(b.class_weights)}")
        return "\n".join(lines)


def _weights_label(cw) -> str:
    if cw is None:
        return "none"
    return cw if isinstance(cw, str) else "custom"


def _grid_job(args):
    train, dev, registry, config, params = args
    try:
        return train_and_evaluate(train, dev, registry, config, params), None
    except Exception as exc:  # a failed cell must not stop the search
        return None, f"{type(exc).__name__}: {exc}"


def grid_search(train: Dataset, dev: Dataset, registry: LexiconRegistry, config: FeatureConfig,
                base: TrainParams = TrainParams(), criterion: str = "accuracy",
                workers: int = 1, candidates: Sequence[TrainParams] | None = None) -> GridResult:
    """Evaluate every candidate on ``dev``; the first best cell wins ties."""
    if criterion not in ("accuracy", "macro_f1"):
        raise EvaluationError("criterion must be 'accuracy' or 'macro_f1'")
    if not dev.instances():
        raise EvaluationError("development split has no labeled instances")
    validate_registry(registry, config)
    candidates = list(candidates) if candidates is not None else grid_params(base)
    results = _map(_grid_job, [(train, dev, registry, config, p) for p in candidates], workers)
    cells = [GridCell(p, rep, err) for p, (rep, err) in zip(candidates, results)]
    for cell in cells:
        if cell.error:
            logger.warning("grid cell C=%g %s %s failed: %s", cell.params.C,
                           cell.params.kernel.kind, cell.params.class_weights, cell.error)
    scores = [cell.score(criterion) for cell in cells]
    if all(np.isneginf(s) for s in scores):
        raise EvaluationError("every grid cell failed")
    best = cells[int(np.argmax(scores))].params
    return GridResult(best, cells, criterion)


# -- class balance ---------------------------------------------------------


def run_balanced(train: Dataset, test: Dataset, registry: LexiconRegistry,
                 config: FeatureConfig, params: TrainParams = TrainParams(),
                 seed: int = 42, train_per_class: int = 330, test_per_class: int = 71) -> EvalReport:
    """Train and test on class-balanced samples of both splits."""
    sub_train = balanced_subset(train, train_per_class, seed)
    sub_test = balanced_subset(test, test_per_class, seed)
    return train_and_evaluate(sub_train, sub_test, registry, config, params)
