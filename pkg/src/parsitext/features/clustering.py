"""KMeans (Lloyd iterations, k-means++ seeding) and the cluster-derived feature sets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import InvalidK, ShapeMismatch
from .text import FeatureMatrix

__all__ = [
    "KMeansModel",
    "assign_clusters",
    "cluster_center_features",
    "cluster_distance_features",
    "combine_features",
    "kmeans_fit",
    "select_k_by_silhouette",
    "silhouette_score",
]

DEFAULT_K = 37
_CHUNK = 512


@dataclass
class KMeansModel:
    centers: np.ndarray
    inertia: float
    n_iter: int = 0
    inertia_history: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    def to_dict(self) -> dict:
        return {"centers": self.centers.tolist(), "inertia": self.inertia, "n_iter": self.n_iter}

    @classmethod
    def from_dict(cls, doc: dict) -> "KMeansModel":
        return cls(np.asarray(doc["centers"], dtype=np.float64), float(doc["inertia"]), int(doc["n_iter"]))


def _dense(X) -> np.ndarray:
    values = X.values if isinstance(X, FeatureMatrix) else X
    return values.toarray() if sp.issparse(values) else np.asarray(values, dtype=np.float64)


def _sq_distances(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # explicit differences (not the expanded dot-product form) so exact ties stay exact
    out = np.empty((X.shape[0], centers.shape[0]))
    for start in range(0, X.shape[0], _CHUNK):
        block = X[start : start + _CHUNK]
        out[start : start + _CHUNK] = ((block[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return out


def _kmeans_pp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    closest = _sq_distances(X, X[chosen])[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            idx = int(rng.integers(n))
        chosen.append(idx)
        closest = np.minimum(closest, _sq_distances(X, X[[idx]])[:, 0])
    return X[chosen].copy()


def kmeans_fit(X, k: int = DEFAULT_K, seed: int = 0, max_iter: int = 300, tol: float = 1e-6) -> KMeansModel:
    """Lloyd's algorithm from k-means++ seeds; stops once no center moves more than ``tol``."""
    data = _dense(X)
    n = data.shape[0]
    if k < 1 or k > n:
        raise InvalidK(f"k must lie in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centers = _kmeans_pp(data, k, rng)
    history = []
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        d2 = _sq_distances(data, centers)
        labels = np.argmin(d2, axis=1)
        history.append(float(d2[np.arange(n), labels].sum()))
        new_centers = centers.copy()
        for j in range(k):
            members = labels == j
            if members.any():
                new_centers[j] = data[members].mean(axis=0)
        shift = np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max()
        centers = new_centers
        if shift < tol:
            break
    d2 = _sq_distances(data, centers)
    inertia = float(d2.min(axis=1).sum())
    history.append(inertia)
    return KMeansModel(centers, inertia, n_iter, history)


def assign_clusters(X, model: KMeansModel) -> np.ndarray:
    """Index of the nearest center; ties go to the lowest index."""
    data = _dense(X)
    if data.shape[1] != model.centers.shape[1]:
        raise ShapeMismatch(f"expected {model.centers.shape[1]} columns, got {data.shape[1]}")
    return np.argmin(_sq_distances(data, model.centers), axis=1)


def cluster_distance_features(X, model: KMeansModel) -> FeatureMatrix:
    data = _dense(X)
    if data.shape[1] != model.centers.shape[1]:
        raise ShapeMismatch(f"expected {model.centers.shape[1]} columns, got {data.shape[1]}")
    dist = np.sqrt(_sq_distances(data, model.centers))
    return FeatureMatrix(dist, [f"dist{j}" for j in range(model.k)], "reduced")


def cluster_center_features(X, model: KMeansModel) -> FeatureMatrix:
    labels = assign_clusters(X, model)
    d = model.centers.shape[1]
    return FeatureMatrix(model.centers[labels].copy(), [f"center{i}" for i in range(d)], "reduced")


def combine_features(*matrices: FeatureMatrix) -> FeatureMatrix:
    """Column-wise concatenation, left to right."""
    if not matrices:
        raise ValueError("nothing to combine")
    rows = {m.rows for m in matrices}
    if len(rows) != 1:
        raise ShapeMismatch(f"row counts differ: {sorted(rows)}")
    if all(m.is_sparse for m in matrices):
        values = sp.hstack([m.values for m in matrices], format="csr")
    else:
        values = np.hstack([m.dense() for m in matrices])
    names = None
    if all(m.feature_names is not None for m in matrices):
        names = [name for m in matrices for name in m.feature_names]
    states = {m.norm_state for m in matrices}
    state = states.pop() if len(states) == 1 else "reduced"
    return FeatureMatrix(values, names, state)


def silhouette_score(X, labels) -> float:
    """Mean silhouette coefficient; O(n^2) memory, fine for desk-scale data."""
    data = _dense(X)
    labels = np.asarray(labels)
    clusters = np.unique(labels)
    if len(clusters) < 2:
        return 0.0
    dist = np.sqrt(_sq_distances(data, data))
    scores = np.zeros(len(data))
    for i in range(len(data)):
        own = labels == labels[i]
        if own.sum() <= 1:
            continue
        a = dist[i, own].sum() / (own.sum() - 1)
        b = min(dist[i, labels == c].mean() for c in clusters if c != labels[i])
        scores[i] = (b - a) / max(a, b) if max(a, b) > 0 else 0.0
    return float(scores.mean())


def select_k_by_silhouette(X, candidates, seed: int = 0) -> int:
    """Pick the cluster count with the best silhouette; ties go to the smaller k."""
    best_k, best = None, -np.inf
    for k in sorted(candidates):
        model = kmeans_fit(X, k, seed)
        score = silhouette_score(X, assign_clusters(X, model)) if k > 1 else -1.0
        if score > best:
            best_k, best = k, score
    return best_k
