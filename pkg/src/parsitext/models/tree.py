"""Gini CART trees, random forests and weighted decision stumps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ..errors import InsufficientData
from .base import Classifier, check_labels, check_X, two_column

__all__ = [
    "ForestModel",
    "TreeModel",
    "build_tree",
    "train_random_forest",
    "train_stump",
    "weighted_gini",
]

_TIE = 1e-12
LEAF = -1


def weighted_gini(w0, w1):
    """Gini impurity of a node holding class weights (w0, w1)."""
    total = w0 + w1
    with np.errstate(invalid="ignore", divide="ignore"):
        p1 = np.where(total > 0, w1 / np.where(total > 0, total, 1.0), 0.0)
    return 2.0 * p1 * (1.0 - p1)


@dataclass
class TreeModel(Classifier):
    """Flat array representation; node 0 is the root.

    ``x[feature] <= threshold`` goes left.  ``value`` holds the weighted class
    counts reaching each node.
    """

    feature: np.ndarray
    threshold_value: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # (nodes, 2)
    impurity: np.ndarray
    n_features: int
    max_depth: Optional[int] = None
    criterion: str = "gini"
    threshold: float = 0.5

    kind = "tree"

    @property
    def node_count(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=int)
        for node in range(self.node_count):
            if self.feature[node] != LEAF:
                depth[self.left[node]] = depth[self.right[node]] = depth[node] + 1
        return int(depth.max())

    @property
    def feature_importances(self) -> np.ndarray:
        """Weighted impurity decrease per feature, normalized to sum to one."""
        imp = np.zeros(self.n_features)
        root_weight = self.value[0].sum()
        for node in range(self.node_count):
            f = self.feature[node]
            if f == LEAF:
                continue
            l, r = self.left[node], self.right[node]
            wn, wl, wr = self.value[node].sum(), self.value[l].sum(), self.value[r].sum()
            decrease = wn * self.impurity[node] - wl * self.impurity[l] - wr * self.impurity[r]
            imp[f] += decrease / root_weight
        total = imp.sum()
        return imp / total if total > 0 else imp

    def apply(self, X) -> np.ndarray:
        X = check_X(X, self.n_features)
        nodes = np.zeros(X.shape[0], dtype=np.int64)
        active = self.feature[nodes] != LEAF
        while active.any():
            idx = np.nonzero(active)[0]
            cur = nodes[idx]
            go_left = X[idx, self.feature[cur]] <= self.threshold_value[cur]
            nodes[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active = self.feature[nodes] != LEAF
        return nodes

    def leaf_labels(self, X) -> np.ndarray:
        v = self.value[self.apply(X)]
        return (v[:, 1] > v[:, 0]).astype(np.int64)

    def predict_proba(self, X) -> np.ndarray:
        v = self.value[self.apply(X)]
        total = v.sum(axis=1)
        return two_column(np.divide(v[:, 1], total, out=np.zeros_like(total), where=total > 0))

    def decision_scores(self, X) -> np.ndarray:
        return self.predict_proba(X)[:, 1]

    def hyperparams(self):
        return {"max_depth": self.max_depth, "criterion": self.criterion}

    def parameters(self):
        return {
            "feature": self.feature.tolist(),
            "threshold_value": self.threshold_value.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "impurity": self.impurity.tolist(),
            "n_features": self.n_features,
            "threshold": self.threshold,
        }

    @classmethod
    def from_parameters(cls, hyperparams, parameters):
        return cls(
            feature=np.asarray(parameters["feature"], dtype=np.int64),
            threshold_value=np.asarray(parameters["threshold_value"], dtype=np.float64),
            left=np.asarray(parameters["left"], dtype=np.int64),
            right=np.asarray(parameters["right"], dtype=np.int64),
            value=np.asarray(parameters["value"], dtype=np.float64).reshape(-1, 2),
            impurity=np.asarray(parameters["impurity"], dtype=np.float64),
            n_features=int(parameters["n_features"]),
            max_depth=hyperparams.get("max_depth"),
            criterion=hyperparams.get("criterion", "gini"),
            threshold=float(parameters["threshold"]),
        )


def _split_costs(x, y, w, criterion):
    """Cost of every midpoint split of one feature, thresholds ascending."""
    order = np.argsort(x, kind="stable")
    xs, ys, ws = x[order], y[order], w[order]
    valid = np.nonzero(xs[:-1] < xs[1:])[0]
    if valid.size == 0:
        return None, None
    cw = np.cumsum(ws)[valid]
    cw1 = np.cumsum(ws * ys)[valid]
    total, total1 = ws.sum(), (ws * ys).sum()
    l1, l0 = cw1, cw - cw1
    r1, r0 = total1 - cw1, (total - cw) - (total1 - cw1)
    if criterion == "gini":
        cost = (cw * weighted_gini(l0, l1) + (total - cw) * weighted_gini(r0, r1)) / total
    else:
        cost = (np.minimum(l0, l1) + np.minimum(r0, r1)) / total
    lo, hi = xs[valid], xs[valid + 1]
    thresholds = lo + (hi - lo) / 2.0
    thresholds = np.where(thresholds >= hi, lo, thresholds)
    return cost, thresholds


def _best_split(X, y, w, features, criterion):
    best = (np.inf, -1, 0.0)
    for f in sorted(features):
        cost, thresholds = _split_costs(X[:, f], y, w, criterion)
        if cost is None:
            continue
        low = cost.min()
        i = int(np.nonzero(cost <= low + _TIE)[0][0])
        if cost[i] < best[0] - _TIE:
            best = (float(cost[i]), f, float(thresholds[i]))
    return best


def build_tree(
    X,
    y,
    sample_weight=None,
    *,
    max_depth: Optional[int] = None,
    max_features: Union[None, int, str] = None,
    min_samples_split: int = 2,
    criterion: str = "gini",
    seed: Union[int, np.random.Generator, None] = 0,
) -> TreeModel:
    """Grow a binary CART tree.

    Splits are searched exhaustively over midpoints of sorted unique values.
    Ties go to the lowest feature index, then the lowest threshold.  With
    ``max_features`` set, each node draws features at random until that many
    non-constant ones were examined.
    """
    if criterion not in ("gini", "error"):
        raise ValueError("criterion must be 'gini' or 'error'")
    X = check_X(X)
    y = check_labels(y, X.shape[0], require_both=False)
    n, d = X.shape
    w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    if w.shape != (n,) or np.any(w < 0) or w.sum() <= 0:
        raise ValueError("sample weights must be non-negative with a positive sum")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    m = _resolve_max_features(max_features, d)

    feature, thr, left, right, value, impurity = [], [], [], [], [], []

    def new_node(idx):
        ww = w[idx]
        w1 = float((ww * y[idx]).sum())
        w0 = float(ww.sum()) - w1
        feature.append(LEAF)
        thr.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append((w0, w1))
        impurity.append(float(weighted_gini(w0, w1)))
        return len(feature) - 1

    def candidates(idx):
        if m >= d:
            return range(d)
        picked, informative = [], 0
        for f in rng.permutation(d):
            picked.append(int(f))
            col = X[idx, f]
            if col.min() < col.max():
                informative += 1
                if informative >= m:
                    break
        return picked

    idx0 = np.nonzero(w > 0)[0]
    stack = [(new_node(idx0), idx0, 0)]
    while stack:
        node, idx, depth = stack.pop()
        w0, w1 = value[node]
        if (max_depth is not None and depth >= max_depth) or len(idx) < min_samples_split:
            continue
        if w0 <= 0 or w1 <= 0:
            continue
        cost, f, t = _best_split(X[idx], y[idx], w[idx], candidates(idx), criterion)
        if f < 0:
            continue
        go_left = X[idx, f] <= t
        feature[node], thr[node] = f, t
        l_idx, r_idx = idx[go_left], idx[~go_left]
        left[node] = new_node(l_idx)
        right[node] = new_node(r_idx)
        # LIFO: the left child is expanded first
        stack.append((right[node], r_idx, depth + 1))
        stack.append((left[node], l_idx, depth + 1))

    return TreeModel(
        feature=np.asarray(feature, dtype=np.int64),
        threshold_value=np.asarray(thr, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=np.float64).reshape(-1, 2),
        impurity=np.asarray(impurity, dtype=np.float64),
        n_features=d,
        max_depth=max_depth,
        criterion=criterion,
    )


def _resolve_max_features(max_features, d) -> int:
    if max_features is None:
        return d
    if max_features == "sqrt":
        return max(1, int(math.sqrt(d)))
    if max_features == "log2":
        return max(1, int(math.log2(d))) if d > 1 else 1
    if isinstance(max_features, float):
        return max(1, int(max_features * d))
    return max(1, min(int(max_features), d))


def train_stump(X, y, sample_weights=None, criterion: str = "gini") -> TreeModel:
    """Depth-1 tree minimizing weighted Gini (or weighted error) over all splits.

    Single-class data gives a leaf-only stump predicting that class.
    """
    X = check_X(X)
    y = check_labels(y, X.shape[0], require_both=False)
    return build_tree(X, y, sample_weights, max_depth=1, criterion=criterion)


@dataclass
class ForestModel(Classifier):
    trees: list
    n_features: int
    n_trees: int = 100
    max_depth: Optional[int] = None
    max_features: Union[None, int, str] = "sqrt"
    bootstrap: bool = True
    seed: int = 0
    threshold: float = 0.5
    importances: np.ndarray = field(default=None, repr=False)

    kind = "forest"

    @property
    def feature_importances(self) -> np.ndarray:
        return self.importances

    def predict_proba(self, X) -> np.ndarray:
        """Fraction of trees voting for each class."""
        X = check_X(X, self.n_features)
        votes = np.mean([t.leaf_labels(X) for t in self.trees], axis=0)
        return two_column(votes)

    def decision_scores(self, X) -> np.ndarray:
        return self.predict_proba(X)[:, 1]

    def hyperparams(self):
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "max_features": self.max_features,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
        }

    def parameters(self):
        return {
            "trees": [{"hyperparams": t.hyperparams(), "parameters": t.parameters()} for t in self.trees],
            "n_features": self.n_features,
            "threshold": self.threshold,
            "importances": self.importances.tolist(),
        }

    @classmethod
    def from_parameters(cls, hyperparams, parameters):
        return cls(
            trees=[TreeModel.from_parameters(t["hyperparams"], t["parameters"]) for t in parameters["trees"]],
            n_features=int(parameters["n_features"]),
            n_trees=int(hyperparams["n_trees"]),
            max_depth=hyperparams.get("max_depth"),
            max_features=hyperparams.get("max_features"),
            bootstrap=bool(hyperparams["bootstrap"]),
            seed=int(hyperparams["seed"]),
            threshold=float(parameters["threshold"]),
            importances=np.asarray(parameters["importances"], dtype=np.float64),
        )


def forest_importances(trees, n_features) -> np.ndarray:
    per_tree = [t.feature_importances for t in trees if (t.feature != LEAF).any()]
    if not per_tree:
        # no tree could split: every feature is equally (un)informative
        return np.full(n_features, 1.0 / n_features)
    imp = np.mean(per_tree, axis=0)
    total = imp.sum()
    return imp / total if total > 0 else np.full(n_features, 1.0 / n_features)


def train_random_forest(
    X,
    y,
    n_trees: int = 100,
    max_depth: Optional[int] = None,
    max_features: Union[None, int, str] = "sqrt",
    bootstrap: bool = True,
    seed: int = 0,
) -> ForestModel:
    """Bagged Gini trees; tree ``i`` draws from its own generator seeded by (seed, i)."""
    X = check_X(X)
    y = check_labels(y, X.shape[0])
    n, d = X.shape
    if n < 2:
        raise InsufficientData("a forest needs at least two samples")
    trees = []
    for i in range(n_trees):
        rng = np.random.default_rng((seed, i))
        weights = np.bincount(rng.integers(0, n, n), minlength=n).astype(np.float64) if bootstrap else None
        if weights is not None and weights[y == 1].sum() * weights[y == 0].sum() == 0:
            # degenerate bootstrap draw: fall back to the full sample for this tree
            weights = None
        trees.append(build_tree(X, y, weights, max_depth=max_depth, max_features=max_features, seed=rng))
    return ForestModel(
        trees=trees,
        n_features=d,
        n_trees=n_trees,
        max_depth=max_depth,
        max_features=max_features,
        bootstrap=bootstrap,
        seed=seed,
        importances=forest_importances(trees, d),
    )
