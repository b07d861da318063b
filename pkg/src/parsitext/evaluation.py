"""Metrics, ROC/AUC, stratified cross-validation, learning curves and threshold tuning."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from .errors import (
    InvalidFraction,
    InvalidK,
    ShapeMismatch,
    TargetUnreachable,
    UndefinedRoc,
)

__all__ = [
    "ConfusionCounts",
    "CvResult",
    "CurvePoint",
    "LearningCurve",
    "PrfScores",
    "RocCurve",
    "ThresholdResult",
    "accuracy",
    "confusion",
    "cross_validate",
    "evaluate_predictions",
    "grid_search",
    "learning_curve",
    "mann_whitney_auc",
    "precision_recall_f1",
    "roc_auc",
    "stratified_folds",
    "tune_threshold",
    "tune_threshold_scores",
]

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------- metrics


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


class PrfScores(NamedTuple):
    precision: float
    recall: float
    f1: float
    # names of metrics whose denominator was zero (reported as 0.0)
    degenerate: frozenset = frozenset()


def _binary(a, name) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 1:
        raise ShapeMismatch(f"{name} must be one-dimensional")
    if not np.all((a == 0) | (a == 1)):
        raise ValueError(f"{name} must be binary 0/1")
    return a.astype(bool)


def confusion(y_true, y_pred) -> ConfusionCounts:
    t = _binary(y_true, "y_true")
    p = _binary(y_pred, "y_pred")
    if t.shape != p.shape:
        raise ShapeMismatch(f"{t.shape[0]} labels but {p.shape[0]} predictions")
    return ConfusionCounts(
        tp=int(np.sum(t & p)),
        fp=int(np.sum(~t & p)),
        tn=int(np.sum(~t & ~p)),
        fn=int(np.sum(t & ~p)),
    )


def precision_recall_f1(counts: ConfusionCounts) -> PrfScores:
    """Zero denominators give 0.0 and are listed in ``degenerate`` instead of raising."""
    degenerate = set()
    if counts.tp + counts.fp:
        p = counts.tp / (counts.tp + counts.fp)
    else:
        p = 0.0
        degenerate.add("precision")
    if counts.tp + counts.fn:
        r = counts.tp / (counts.tp + counts.fn)
    else:
        r = 0.0
        degenerate.add("recall")
    if p + r > 0:
        f1 = 2.0 * p * r / (p + r)
    else:
        f1 = 0.0
        degenerate.add("f1")
    return PrfScores(p, r, f1, frozenset(degenerate))


def accuracy(counts: ConfusionCounts) -> float:
    return (counts.tp + counts.tn) / counts.total if counts.total else 0.0


# --------------------------------------------------------------------------- ROC


@dataclass(frozen=True)
class RocCurve:
    """Points ``(fpr, tpr, threshold)`` in descending threshold order.

    A row counts as positive when its score is >= the threshold; the first
    point uses threshold +inf so that (0, 0) is always present.
    """

    points: list
    auc: float

    @property
    def fpr(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def tpr(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @property
    def thresholds(self) -> np.ndarray:
        return np.array([p[2] for p in self.points])


def _check_scored(y_true, scores):
    y = _binary(y_true, "y_true")
    s = np.asarray(scores, dtype=np.float64).ravel()
    if s.shape != y.shape:
        raise ShapeMismatch(f"{y.shape[0]} labels but {s.shape[0]} scores")
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    return y, s


def roc_auc(y_true, scores) -> RocCurve:
    y, s = _check_scored(y_true, scores)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedRoc("ROC needs at least one positive and one negative")
    order = np.argsort(-s, kind="stable")
    s_sorted, y_sorted = s[order], y[order]
    tps = np.cumsum(y_sorted)
    fps = np.cumsum(~y_sorted)
    # the last row of every tied block closes a threshold
    last = np.r_[np.nonzero(np.diff(s_sorted))[0], s_sorted.size - 1]
    tpr = np.r_[0.0, tps[last] / n_pos]
    fpr = np.r_[0.0, fps[last] / n_neg]
    thresholds = np.r_[np.inf, s_sorted[last]]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    points = [(float(a), float(b), float(t)) for a, b, t in zip(fpr, tpr, thresholds)]
    return RocCurve(points, auc)


def mann_whitney_auc(y_true, scores) -> float:
    """P(score of a random positive > that of a random negative), ties counting one half."""
    y, s = _check_scored(y_true, scores)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedRoc("AUC needs at least one positive and one negative")
    ranks = rankdata(s)  # average ranks resolve ties as half-wins
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def evaluate_predictions(y_true, y_pred, scores=None) -> dict:
    """Flat metric dictionary for reports; AUC only when it is defined."""
    counts = confusion(y_true, y_pred)
    prf = precision_recall_f1(counts)
    out = {
        "precision": prf.precision,
        "recall": prf.recall,
        "f1": prf.f1,
        "accuracy": accuracy(counts),
        "confusion": counts.to_dict(),
        "degenerate": sorted(prf.degenerate),
    }
    if scores is not None:
        try:
            out["auc"] = roc_auc(y_true, scores).auc
        except UndefinedRoc:
            out["auc"] = None
    return out


# --------------------------------------------------------------------------- resampling helpers


def _n_rows(X) -> int:
    if hasattr(X, "rows"):
        return X.rows
    return X.shape[0] if hasattr(X, "shape") else len(X)


def _take(X, idx):
    if hasattr(X, "take_rows"):
        return X.take_rows(idx)
    if isinstance(X, (list, tuple)):
        return [X[i] for i in idx]
    return X[np.asarray(idx)]


def _as_learner(spec):
    if hasattr(spec, "fit"):
        return spec
    from .learners import as_spec

    return as_spec(spec)


def _scores_and_labels(model, X):
    return model.decision_scores(X), model.predict(X)


def stratified_folds(y, k: int, seed: int = 0) -> list:
    """Partition row indices into ``k`` stratified folds.

    Each class is shuffled separately, the classes are laid end to end and
    position ``i`` goes to fold ``i mod k``; fold sizes and per-class counts
    therefore differ by at most one.
    """
    y = np.asarray(y)
    n = y.shape[0]
    if k < 2 or k > n:
        raise InvalidK(f"k must lie in [2, {n}], got {k}")
    rng = np.random.default_rng(seed)
    order = np.concatenate([rng.permutation(np.nonzero(y == c)[0]) for c in np.unique(y)])
    folds = [np.sort(order[f::k]) for f in range(k)]
    return folds


@dataclass
class CvResult:
    k: int
    per_fold: list
    mean: dict
    std: dict
    fold_indices: list = field(repr=False)
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "per_fold": self.per_fold,
            "mean": self.mean,
            "std": self.std,
            "fold_sizes": [len(f) for f in self.fold_indices],
        }


_SCALAR_METRICS = ("precision", "recall", "f1", "accuracy", "auc")


def _aggregate(per_fold: Sequence[Mapping]) -> tuple:
    mean, std = {}, {}
    for key in _SCALAR_METRICS:
        vals = [f[key] for f in per_fold if f.get(key) is not None]
        if vals:
            mean[key] = float(np.mean(vals))
            std[key] = float(np.std(vals))
    return mean, std


def cross_validate(learner_spec, X, y, k: int = 10, seed: int = 0) -> CvResult:
    """Stratified k-fold evaluation.

    ``learner_spec`` is anything with ``fit(X, y, seed)``.  Passing a text
    pipeline spec together with raw documents refits the vocabulary, TF-IDF
    and PCA on each training part, so held-out folds never leak into them.
    """
    learner = _as_learner(learner_spec)
    y = np.asarray(y)
    if y.shape[0] != _n_rows(X):
        raise ShapeMismatch("X and y disagree on the number of rows")
    folds = stratified_folds(y, k, seed)
    per_fold = []
    all_idx = np.arange(y.shape[0])
    for f, test_idx in enumerate(folds):
        train_idx = np.setdiff1d(all_idx, test_idx, assume_unique=True)
        model = learner.fit(_take(X, train_idx), y[train_idx], seed=seed)
        X_test = _take(X, test_idx)
        scores, pred = _scores_and_labels(model, X_test)
        metrics = evaluate_predictions(y[test_idx], pred, scores)
        metrics["fold"] = f
        metrics["size"] = int(test_idx.size)
        per_fold.append(metrics)
        log.debug("fold %d/%d: f1=%.4f", f + 1, k, metrics["f1"])
    mean, std = _aggregate(per_fold)
    return CvResult(k=k, per_fold=per_fold, mean=mean, std=std, fold_indices=folds, seed=seed)


# --------------------------------------------------------------------------- learning curves


class CurvePoint(NamedTuple):
    size: int
    train: float
    val: float

    @property
    def gap(self) -> float:
        return self.train - self.val


@dataclass
class LearningCurve:
    points: list
    metric: str

    @property
    def gaps(self) -> np.ndarray:
        return np.array([p.gap for p in self.points])

    @property
    def mean_gap(self) -> float:
        """Average train-minus-validation gap over all sizes: large means high variance."""
        return float(self.gaps.mean())

    @property
    def final_gap(self) -> float:
        """Gap at the largest training size."""
        return float(self.points[-1].gap)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "points": [{"size": p.size, "train": p.train, "val": p.val} for p in self.points],
            "mean_gap": self.mean_gap,
            "final_gap": self.final_gap,
        }


def _interleaved_order(y, rng) -> np.ndarray:
    """Shuffle rows so that every prefix keeps the overall class ratio."""
    keys, rows = [], []
    for c in np.unique(y):
        idx = rng.permutation(np.nonzero(y == c)[0])
        keys.append((np.arange(idx.size) + 0.5) / idx.size)
        rows.append(idx)
    keys, rows = np.concatenate(keys), np.concatenate(rows)
    return rows[np.argsort(keys, kind="stable")]


def stratified_holdout(y, fraction: float, seed: int = 0) -> tuple:
    """(train_idx, test_idx), both sorted; each class contributes round(fraction * n_c) rows."""
    if not 0.0 < fraction < 1.0:
        raise InvalidFraction(f"held-out fraction must lie in (0, 1), got {fraction}")
    y = np.asarray(y)
    n = y.shape[0]
    n_test = int(round(fraction * n))
    if n_test < 1 or n_test >= n:
        raise InvalidFraction(f"fraction {fraction} of {n} rows leaves an empty side")
    rng = np.random.default_rng(seed)
    order = _interleaved_order(y, rng)
    test = np.sort(order[:n_test])
    train = np.setdiff1d(np.arange(n), test, assume_unique=True)
    return train, test


def _metric(name, y_true, pred, scores) -> float:
    if name == "auc":
        return roc_auc(y_true, scores).auc
    counts = confusion(y_true, pred)
    if name == "accuracy":
        return accuracy(counts)
    return getattr(precision_recall_f1(counts), name)


def learning_curve(
    learner_spec,
    X,
    y,
    train_fractions: Iterable[float] = (0.1, 0.2, 0.4, 0.6, 0.8, 1.0),
    seed: int = 0,
    validation_fraction: float = 0.2,
    metric: str = "accuracy",
    validation: Optional[tuple] = None,
) -> LearningCurve:
    """Train on growing stratified prefixes of one fixed shuffle; score train and held-out rows.

    ``validation=(X_val, y_val)`` supplies the held-out set explicitly; by
    default ``validation_fraction`` of the rows are held out.
    """
    learner = _as_learner(learner_spec)
    fractions = list(train_fractions)
    if not fractions or any(not 0.0 < f <= 1.0 for f in fractions):
        raise InvalidFraction("train fractions must lie in (0, 1]")
    y = np.asarray(y)
    if validation is None:
        pool, held = stratified_holdout(y, validation_fraction, seed)
        X_val, y_val = _take(X, held), y[held]
    else:
        pool = np.arange(y.shape[0])
        X_val, y_val = validation[0], np.asarray(validation[1])
    order = pool[_interleaved_order(y[pool], np.random.default_rng((seed, 1)))]
    points = []
    for frac in fractions:
        size = min(max(2, int(round(frac * order.size))), order.size)
        idx = np.sort(order[:size])
        X_tr, y_tr = _take(X, idx), y[idx]
        model = learner.fit(X_tr, y_tr, seed=seed)
        s_tr, p_tr = _scores_and_labels(model, X_tr)
        s_val, p_val = _scores_and_labels(model, X_val)
        points.append(CurvePoint(size, _metric(metric, y_tr, p_tr, s_tr), _metric(metric, y_val, p_val, s_val)))
    return LearningCurve(points, metric)


# --------------------------------------------------------------------------- thresholds


class ThresholdResult(NamedTuple):
    threshold: float
    precision: float
    recall: float
    degenerate: frozenset = frozenset()


def candidate_thresholds(scores) -> np.ndarray:
    """One threshold per distinct prediction set under the rule ``score > t``.

    Midpoints between consecutive distinct scores, plus one value below the
    minimum (everything positive) and one above the maximum (nothing positive).
    """
    u = np.unique(np.asarray(scores, dtype=np.float64))
    inner = (u[:-1] + u[1:]) / 2.0
    return np.r_[u[0] - 1.0, inner, u[-1] + 1.0]


def tune_threshold_scores(y_true, scores, target=("recall", 0.91)) -> ThresholdResult:
    """Pick a decision threshold on validation scores.

    For a recall target the largest threshold still reaching it is returned
    (recall only falls as the threshold rises, so this buys the most
    precision).  For a precision target the smallest qualifying threshold is
    returned, which keeps recall as high as possible.
    """
    metric, value = target
    if metric not in ("recall", "precision"):
        raise ValueError("target metric must be 'recall' or 'precision'")
    y, s = _check_scored(y_true, scores)
    y = y.astype(np.int64)
    candidates = candidate_thresholds(s)
    results = []
    for t in candidates:
        prf = precision_recall_f1(confusion(y, (s > t).astype(np.int64)))
        results.append(ThresholdResult(float(t), prf.precision, prf.recall, prf.degenerate))
    achieved = [getattr(r, metric) for r in results]
    ok = [i for i, a in enumerate(achieved) if a >= value]
    if not ok:
        raise TargetUnreachable(metric, value, max(achieved))
    return results[max(ok)] if metric == "recall" else results[min(ok)]


def tune_threshold(model, X_val, y_val, target=("recall", 0.91)) -> ThresholdResult:
    """Threshold on ``model.decision_scores``; apply with ``model.with_threshold``."""
    return tune_threshold_scores(y_val, model.decision_scores(X_val), target)


# --------------------------------------------------------------------------- grid search


def grid_search(kind: str, grid: Mapping[str, Sequence], X, y, k: int = 10, seed: int = 0,
                metric: str = "f1", base_params: Optional[Mapping] = None) -> dict:
    """Cross-validate every combination in ``grid``; best by mean ``metric`` (first wins ties)."""
    from .learners import LearnerSpec

    keys = sorted(grid)
    results = []
    for combo in itertools.product(*(grid[key] for key in keys)):
        params = dict(base_params or {})
        params.update(zip(keys, combo))
        cv = cross_validate(LearnerSpec(kind, params), X, y, k=k, seed=seed)
        results.append({"params": params, "mean": cv.mean, "std": cv.std})
    best = max(range(len(results)), key=lambda i: (results[i]["mean"].get(metric, -np.inf), -i))
    return {"best_params": results[best]["params"], "metric": metric, "results": results}
