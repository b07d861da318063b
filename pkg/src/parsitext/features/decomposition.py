"""PCA that keeps the smallest number of components reaching a variance target."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..errors import InsufficientData, InvalidFraction, ShapeMismatch
from .text import FeatureMatrix

__all__ = ["PcaModel", "pca_fit", "pca_transform"]


@dataclass
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (k, d), orthonormal rows
    explained_variance: np.ndarray
    explained_variance_ratio: np.ndarray
    target_ratio: float

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    @property
    def retained_ratio(self) -> float:
        return float(self.explained_variance_ratio.sum())

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance": self.explained_variance.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
            "target_ratio": self.target_ratio,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PcaModel":
        d = len(doc["mean"])
        return cls(
            mean=np.asarray(doc["mean"], dtype=np.float64),
            components=np.asarray(doc["components"], dtype=np.float64).reshape(-1, d),
            explained_variance=np.asarray(doc["explained_variance"], dtype=np.float64),
            explained_variance_ratio=np.asarray(doc["explained_variance_ratio"], dtype=np.float64),
            target_ratio=float(doc["target_ratio"]),
        )


def _values(X):
    return X.values if isinstance(X, FeatureMatrix) else X


def pca_fit(X, target_ratio: float = 0.99) -> PcaModel:
    """Mean-centred SVD; keep the shortest prefix whose variance ratio reaches the target.

    Sparse input is densified after centring, which is fine for desk-scale corpora.
    """
    if not 0.0 < target_ratio <= 1.0:
        raise InvalidFraction(f"target_ratio must lie in (0, 1], got {target_ratio}")
    values = _values(X)
    dense = values.toarray() if sp.issparse(values) else np.asarray(values, dtype=np.float64)
    n, d = dense.shape
    if n < 2:
        raise InsufficientData("PCA needs at least two rows")
    mean = dense.mean(axis=0)
    centred = dense - mean
    _, s, vt = np.linalg.svd(centred, full_matrices=False)
    variance = s**2 / (n - 1)
    total = variance.sum()
    if total <= 0.0:
        raise InsufficientData("all rows are identical; no variance to retain")
    ratio = variance / total
    reached = np.nonzero(np.cumsum(ratio) >= target_ratio)[0]
    k = int(reached[0]) + 1 if reached.size else int(np.count_nonzero(ratio > 0))
    components = vt[:k].copy()
    # deterministic sign: largest-magnitude loading of each component is positive
    pivots = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(k), pivots])
    components *= signs[:, None]
    return PcaModel(mean, components, variance[:k], ratio[:k], float(target_ratio))


def pca_transform(X, model: PcaModel) -> FeatureMatrix:
    values = _values(X)
    if values.shape[1] != model.mean.shape[0]:
        raise ShapeMismatch(f"expected {model.mean.shape[0]} columns, got {values.shape[1]}")
    # (X - mean) C^T without densifying sparse X
    projected = np.asarray(values @ model.components.T) - model.mean @ model.components.T
    names = [f"pc{i}" for i in range(model.n_components)]
    return FeatureMatrix(np.asarray(projected), names, "reduced")


def pca_inverse_transform(Z, model: PcaModel) -> np.ndarray:
    return np.asarray(_values(Z)) @ model.components + model.mean
