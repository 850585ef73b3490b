"""Soft-margin kernel SVM trained with SMO, combined one-vs-one.

The binary solver minimises the dual

    f(a) = 1/2 a'Qa - e'a,   Q_ij = y_i y_j K(x_i, x_j)
    subject to 0 <= a_i <= C_i,  y'a = 0

by repeatedly optimising a pair of multipliers: the maximal violating pair
with second-order selection of the second index (Fan, Chen & Lin, 2005).
It stops when the gap between the largest ``-y_i g_i`` over the "up" set and
the smallest over the "low" set drops below ``tol``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from itertools import combinations
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np

from .corpus import LABELS, StanceLabel
from .features import FeatureVector, Scaler

logger = logging.getLogger(__name__)

KERNELS = ("linear", "rbf", "polynomial", "sigmoid")
FORMAT_NAME = "rumourstance-model"
FORMAT_VERSION = 1

# curvature used in place of a non-positive second derivative along the pair
_TAU = 1e-12


class SVMError(ValueError):
    pass


class ModelFormatError(SVMError):
    pass


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    gamma: float | None = None  # None: 1 / n_features, fixed at training time
    degree: int = 3
    coef0: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == "poly":
            object.__setattr__(self, "kind", "polynomial")
        if self.kind not in KERNELS:
            raise SVMError(f"unknown kernel {self.kind!r}; choose from {', '.join(KERNELS)}")
        if self.gamma is not None and not self.gamma > 0:
            raise SVMError("gamma must be positive")
        if int(self.degree) < 1:
            raise SVMError("degree must be >= 1")

    def resolve(self, n_features: int) -> "KernelSpec":
        if self.gamma is not None:
            return self
        return replace(self, gamma=1.0 / max(n_features, 1))


def _gamma(spec: KernelSpec, d: int) -> float:
    return spec.gamma if spec.gamma is not None else 1.0 / max(d, 1)


def kernel_eval(spec: KernelSpec, x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise SVMError(f"dimension mismatch: {x.shape} vs {y.shape}")
    g = _gamma(spec, x.size)
    if spec.kind == "linear":
        return float(x @ y)
    if spec.kind == "rbf":
        diff = x - y
        return float(np.exp(-g * (diff @ diff)))
    if spec.kind == "polynomial":
        return float((g * (x @ y) + spec.coef0) ** spec.degree)
    return float(np.tanh(g * (x @ y) + spec.coef0))


def kernel_matrix(spec: KernelSpec, A: np.ndarray, B: np.ndarray | None = None) -> np.ndarray:
    """Gram matrix K[i, j] = k(A[i], B[j]); ``B=None`` means ``B = A``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    same = B is None
    B = A if same else np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise SVMError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    g = _gamma(spec, A.shape[1])
    dot = A @ B.T
    if same:
        dot = (dot + dot.T) / 2
    if spec.kind == "linear":
        return dot
    if spec.kind == "rbf":
        sq_a = np.einsum("ij,ij->i", A, A)
        sq_b = sq_a if same else np.einsum("ij,ij->i", B, B)
        d2 = np.maximum(sq_a[:, None] + sq_b[None, :] - 2 * dot, 0.0)
        if same:
            np.fill_diagonal(d2, 0.0)
        return np.exp(-g * d2)
    if spec.kind == "polynomial":
        return (g * dot + spec.coef0) ** spec.degree
    return np.tanh(g * dot + spec.coef0)


@dataclass(frozen=True)
class TrainParams:
    """Training settings.

    ``class_weights`` is ``None`` (every multiplier bounded by ``C``),
    ``"balanced"`` (weight ``N / (k * count(c))``), or a mapping from label
    to weight; the bound for sample ``i`` is ``C * weight(y_i)``.
    ``max_passes`` caps consecutive iterations without objective progress
    (default ``10 * n``); ``max_iter`` is a hard cap on iterations.
    """

    C: float = 1.0
    kernel: KernelSpec = field(default_factory=KernelSpec)
    class_weights: Mapping[Hashable, float] | str | None = None
    tol: float = 1e-3
    max_passes: int | None = None
    max_iter: int | None = None

    def __post_init__(self) -> None:
        if not self.C > 0:
            raise SVMError("C must be positive")
        if not self.tol > 0:
            raise SVMError("tol must be positive")
        cw = self.class_weights
        if isinstance(cw, str) and cw != "balanced":
            raise SVMError(f"class_weights must be None, 'balanced' or a mapping, not {cw!r}")
        if isinstance(cw, Mapping) and any(not w > 0 for w in cw.values()):
            raise SVMError("class weights must be positive")

    def describe(self) -> dict:
        cw = self.class_weights
        if isinstance(cw, Mapping):
            cw = {getattr(k, "value", str(k)): float(v) for k, v in sorted(cw.items(), key=lambda kv: str(kv[0]))}
        return {
            "C": self.C,
            "kernel": asdict(self.kernel),
            "class_weights": cw,
            "tol": self.tol,
        }


# -- SMO -------------------------------------------------------------------


@dataclass
class DualSolution:
    alpha: np.ndarray
    bias: float
    objective: float  # dual objective e'a - 1/2 a'Qa (maximised)
    n_iter: int
    converged: bool
    gap: float


def solve_dual(K: np.ndarray, y: np.ndarray, upper: np.ndarray, tol: float = 1e-3,
               max_iter: int | None = None, max_passes: int | None = None,
               callback: Callable[[int, float], None] | None = None) -> DualSolution:
    """SMO on a precomputed kernel matrix.

    ``y`` holds +1/-1, ``upper`` the per-sample box bounds. ``callback`` is
    called after every update with the iteration number and the current dual
    objective.
    """
    n = len(y)
    y = np.asarray(y, dtype=float)
    upper = np.asarray(upper, dtype=float)
    diag = np.diag(K).copy()
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of f = Qa - e
    max_iter = max(10_000_000, 100 * n) if max_iter is None else max_iter
    max_passes = 10 * n if max_passes is None else max_passes

    f_val = 0.0
    stall = 0
    it = 0
    converged = False
    gap = np.inf
    while it < max_iter:
        at_upper = alpha >= upper
        at_lower = alpha <= 0
        up = np.where(y > 0, ~at_upper, ~at_lower)
        low = np.where(y > 0, ~at_lower, ~at_upper)
        score = -y * grad
        if not up.any() or not low.any():
            converged, gap = True, 0.0
            break
        i = int(np.argmax(np.where(up, score, -np.inf)))
        g_max = score[i]
        g_min = np.min(score[low])
        gap = g_max - g_min
        if gap < tol:
            converged = True
            break

        b = g_max - score
        a = diag[i] + diag - 2 * K[i]
        a = np.where(a > 0, a, _TAU)
        cand = low & (score < g_max)
        j = int(np.argmin(np.where(cand, -(b * b) / a, np.inf)))

        ai_old, aj_old = alpha[i], alpha[j]
        ci, cj = upper[i], upper[j]
        if y[i] != y[j]:
            quad = diag[i] + diag[j] - 2 * K[i, j]
            quad = quad if quad > 0 else _TAU
            delta = (-grad[i] - grad[j]) / quad
            diff = ai_old - aj_old
            ai, aj = ai_old + delta, aj_old + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > ci - cj:
                if ai > ci:
                    ai, aj = ci, ci - diff
            elif aj > cj:
                aj, ai = cj, cj + diff
        else:
            quad = diag[i] + diag[j] - 2 * K[i, j]
            quad = quad if quad > 0 else _TAU
            delta = (grad[i] - grad[j]) / quad
            total = ai_old + aj_old
            ai, aj = ai_old - delta, aj_old + delta
            if total > ci:
                if ai > ci:
                    ai, aj = ci, total - ci
            elif aj < 0:
                aj, ai = 0.0, total
            if total > cj:
                if aj > cj:
                    aj, ai = cj, total - cj
            elif ai < 0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        dai, daj = ai - ai_old, aj - aj_old
        grad += y * (y[i] * dai * K[i] + y[j] * daj * K[j])
        it += 1

        new_f = 0.5 * float(alpha @ (grad - 1.0))
        if new_f < f_val - 1e-15 * max(1.0, abs(f_val)):
            stall = 0
        else:
            stall += 1
        f_val = new_f
        if callback is not None:
            callback(it, -f_val)
        if stall >= max_passes:
            logger.warning("SMO stopped after %d iterations without progress (gap %.3g)", stall, gap)
            break
    else:
        logger.warning("SMO hit the iteration cap %d (gap %.3g)", max_iter, gap)

    return DualSolution(alpha, -_threshold(alpha, y, grad, upper), -f_val, it, converged, float(gap))


def _threshold(alpha: np.ndarray, y: np.ndarray, grad: np.ndarray, upper: np.ndarray) -> float:
    """Offset r with decision(x) = sum a_i y_i K(x_i, x) - r."""
    yg = y * grad
    free = (alpha > 0) & (alpha < upper)
    if free.any():
        return float(yg[free].mean())
    at_upper = alpha >= upper
    # bounds on r implied by the KKT conditions of bounded multipliers
    ub_mask = (at_upper & (y < 0)) | (~at_upper & (y > 0))
    lb_mask = (at_upper & (y > 0)) | (~at_upper & (y < 0))
    ub = yg[ub_mask].min() if ub_mask.any() else np.inf
    lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
    if np.isinf(ub) or np.isinf(lb):
        return float(ub if np.isfinite(ub) else lb if np.isfinite(lb) else 0.0)
    return float((ub + lb) / 2)


# -- binary model ----------------------------------------------------------


@dataclass
class BinaryModel:
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # a_i * y_i for each support vector
    bias: float
    kernel: KernelSpec
    labels: tuple = (1, -1)  # (positive, negative)
    objective: float = float("nan")
    n_iter: int = 0
    converged: bool = True

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.support_vectors.shape[1]:
            raise SVMError(f"expected {self.support_vectors.shape[1]} features, got {X.shape[1]}")
        if len(self.dual_coef) == 0:
            return np.full(len(X), self.bias)
        return kernel_matrix(self.kernel, X, self.support_vectors) @ self.dual_coef + self.bias


def _check_xy(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise SVMError("X must be a 2-d array")
    if not np.all(np.isfinite(X)):
        raise SVMError("X contains non-finite values")
    y = np.asarray(y)
    if len(y) != len(X):
        raise SVMError("X and y differ in length")
    return X, y


def train_binary(X, y, params: TrainParams = TrainParams(),
                 callback: Callable[[int, float], None] | None = None) -> BinaryModel:
    """Fit a binary SVM on labels +1/-1.

    ``params.class_weights`` may map +1 and -1 to cost multipliers.
    """
    X, y = _check_xy(X, y)
    y = y.astype(float)
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise SVMError("binary labels must be +1 or -1")
    if len(np.unique(y)) < 2:
        raise SVMError("training data holds a single class")
    kernel = params.kernel.resolve(X.shape[1])
    upper = np.full(len(y), float(params.C))
    cw = params.class_weights
    if cw == "balanced":
        n_pos = np.sum(y > 0)
        n_neg = len(y) - n_pos
        upper = np.where(y > 0, params.C * len(y) / (2 * n_pos), params.C * len(y) / (2 * n_neg))
    elif isinstance(cw, Mapping):
        upper = np.where(y > 0, params.C * cw.get(1, 1.0), params.C * cw.get(-1, 1.0))
    K = kernel_matrix(kernel, X)
    sol = solve_dual(K, y, upper, params.tol, params.max_iter, params.max_passes, callback)
    sv = sol.alpha > 0
    return BinaryModel(
        support_vectors=X[sv].copy(),
        dual_coef=(sol.alpha * y)[sv],
        bias=sol.bias,
        kernel=kernel,
        objective=sol.objective,
        n_iter=sol.n_iter,
        converged=sol.converged,
    )


def decision_value(model: BinaryModel, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise SVMError("decision_value takes a single vector")
    return float(model.decision_function(x[None, :])[0])


# -- one-vs-one ------------------------------------------------------------


def balanced_weights(labels: Sequence[Hashable]) -> dict:
    """weight(c) = N / (k * count(c))."""
    classes = sorted(set(labels), key=_label_key)
    n, k = len(labels), len(classes)
    return {c: n / (k * sum(1 for v in labels if v == c)) for c in classes}


def _label_key(label):
    if isinstance(label, StanceLabel):
        return (0, LABELS.index(label), "")
    return (1, 0, str(label))


@dataclass
class StanceModel:
    classes: tuple
    binaries: list[BinaryModel]
    scaler: Scaler
    params: TrainParams
    config_name: str = ""

    @property
    def schema(self) -> tuple[str, ...]:
        return self.scaler.schema

    def _pairs(self):
        return list(combinations(range(len(self.classes)), 2))

    def _prepare(self, X) -> np.ndarray:
        if isinstance(X, FeatureVector):
            if X.schema != self.schema:
                raise SVMError("feature vector schema does not match the model")
            X = X.values
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != len(self.schema):
            raise SVMError(f"expected {len(self.schema)} features, got {X.shape[1]}")
        return self.scaler.transform(X)

    def decision_matrix(self, X) -> np.ndarray:
        """Decision value of every pairwise model, shape (n, n_pairs)."""
        Z = self._prepare(X)
        return np.column_stack([m.decision_function(Z) for m in self.binaries])

    def vote(self, D: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Votes and summed signed decision values per class."""
        n, k = len(D), len(self.classes)
        votes = np.zeros((n, k), dtype=int)
        margin = np.zeros((n, k))
        for col, (a, b) in enumerate(self._pairs()):
            d = D[:, col]
            votes[:, a] += d > 0
            votes[:, b] += d <= 0
            margin[:, a] += d
            margin[:, b] -= d
        return votes, margin

    def predict(self, X) -> list:
        votes, margin = self.vote(self.decision_matrix(X))
        out = []
        for v, m in zip(votes, margin):
            tied = np.flatnonzero(v == v.max())
            best = tied[int(np.argmax(m[tied]))]
            out.append(self.classes[best])
        return out


def _fit_pair(args):
    X, y, upper_pos, upper_neg, params = args
    weights = {1: upper_pos / params.C, -1: upper_neg / params.C}
    return train_binary(X, y, replace(params, class_weights=weights))


def train_multiclass(X, labels: Sequence[Hashable], params: TrainParams = TrainParams(),
                     schema: Sequence[str] | None = None, config_name: str = "",
                     scale: bool = True, workers: int = 1) -> StanceModel:
    """One binary model per unordered pair of classes.

    ``X`` is unscaled; a :class:`Scaler` is fitted on it (or an identity
    scaler with ``scale=False``) and stored in the model.
    """
    labels = list(labels)
    X, _ = _check_xy(X, np.arange(len(labels)))
    classes = tuple(sorted(set(labels), key=_label_key))
    if len(classes) < 2:
        raise SVMError("need at least two classes")
    schema = tuple(schema) if schema is not None else tuple(f"f{i}" for i in range(X.shape[1]))
    scaler = Scaler.fit(X, schema) if scale else Scaler.identity(schema)
    Z = scaler.transform(X)
    kernel = params.kernel.resolve(X.shape[1])

    cw = params.class_weights
    if cw == "balanced":
        weights = balanced_weights(labels)
    elif isinstance(cw, Mapping):
        missing = [c for c in classes if c not in cw]
        if missing:
            raise SVMError(f"class_weights missing labels {missing}")
        weights = dict(cw)
    else:
        weights = {c: 1.0 for c in classes}
    resolved = replace(params, kernel=kernel)

    index = {c: k for k, c in enumerate(classes)}
    codes = np.array([index[v] for v in labels])
    jobs = []
    for a, b in combinations(range(len(classes)), 2):
        mask = (codes == a) | (codes == b)
        y = np.where(codes[mask] == a, 1.0, -1.0)
        jobs.append((Z[mask], y, params.C * weights[classes[a]], params.C * weights[classes[b]],
                     replace(resolved, class_weights=None)))

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            fitted = list(pool.map(_fit_pair, jobs))
    else:
        fitted = [_fit_pair(job) for job in jobs]
    for (a, b), model in zip(combinations(range(len(classes)), 2), fitted):
        model.labels = (classes[a], classes[b])
    return StanceModel(classes, fitted, scaler, resolved, config_name)


def predict(model: StanceModel, x):
    """Label of a single (unscaled) feature vector."""
    if isinstance(x, FeatureVector):
        return model.predict(x)[0]
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise SVMError("predict takes a single vector; use StanceModel.predict for batches")
    return model.predict(x[None, :])[0]


# -- persistence -----------------------------------------------------------


def _label_out(label):
    return label.value if isinstance(label, StanceLabel) else label


def _label_in(value):
    if isinstance(value, str):
        try:
            return StanceLabel(value)
        except ValueError:
            return value
    return value


def _floats(a) -> list:
    return [float(v) for v in np.asarray(a, dtype=float).ravel()]


def model_to_dict(model: StanceModel) -> dict:
    d = len(model.schema)
    body = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "config": model.config_name,
        "schema": list(model.schema),
        "classes": [_label_out(c) for c in model.classes],
        "params": model.params.describe(),
        "scaler": {"mean": _floats(model.scaler.mean), "std": _floats(model.scaler.std)},
        "binary_models": [
            {
                "positive": _label_out(m.labels[0]),
                "negative": _label_out(m.labels[1]),
                "kernel": asdict(m.kernel),
                "bias": float(m.bias),
                "dual_coef": _floats(m.dual_coef),
                "support_vectors": [_floats(row) for row in m.support_vectors.reshape(-1, d)],
                "objective": float(m.objective),
                "n_iter": int(m.n_iter),
                "converged": bool(m.converged),
            }
            for m in model.binaries
        ],
    }
    body["checksum"] = _checksum(body)
    return body


def _checksum(body: dict) -> str:
    payload = {k: v for k, v in body.items() if k != "checksum"}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def model_from_dict(body: dict) -> StanceModel:
    if not isinstance(body, dict) or body.get("format") != FORMAT_NAME:
        raise ModelFormatError("not a model file")
    if body.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model version {body.get('version')!r}")
    if body.get("checksum") != _checksum(body):
        raise ModelFormatError("model checksum mismatch (file corrupted or edited)")
    try:
        schema = tuple(body["schema"])
        d = len(schema)
        scaler = Scaler(np.array(body["scaler"]["mean"], dtype=float),
                        np.array(body["scaler"]["std"], dtype=float), schema)
        p = body["params"]
        cw = p["class_weights"]
        if isinstance(cw, dict):
            cw = {_label_in(k): v for k, v in cw.items()}
        params = TrainParams(C=p["C"], kernel=KernelSpec(**p["kernel"]), class_weights=cw, tol=p["tol"])
        binaries = []
        for m in body["binary_models"]:
            sv = np.array(m["support_vectors"], dtype=float).reshape(-1, d)
            binaries.append(BinaryModel(
                support_vectors=sv,
                dual_coef=np.array(m["dual_coef"], dtype=float),
                bias=float(m["bias"]),
                kernel=KernelSpec(**m["kernel"]),
                labels=(_label_in(m["positive"]), _label_in(m["negative"])),
                objective=float(m["objective"]),
                n_iter=int(m["n_iter"]),
                converged=bool(m["converged"]),
            ))
        classes = tuple(_label_in(c) for c in body["classes"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model file: {exc}") from None
    k = len(classes)
    if len(binaries) != k * (k - 1) // 2:
        raise ModelFormatError("model holds the wrong number of pairwise classifiers")
    return StanceModel(classes, binaries, scaler, params, body.get("config", ""))


def dumps(model: StanceModel) -> str:
    return json.dumps(model_to_dict(model), indent=1, sort_keys=True) + "\n"


def save(model: StanceModel, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(model))


def load(path: str | os.PathLike) -> StanceModel:
    try:
        with open(path, encoding="utf-8") as fh:
            body = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: unreadable model file ({exc.msg})") from None
    return model_from_dict(body)
