"""Input validation and the common predict contract shared by every learner."""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.sparse as sp

from ..errors import DegenerateLabels, NonFiniteInput, ShapeMismatch

__all__ = ["Classifier", "check_X", "check_labels", "sigmoid"]


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def check_X(X, n_features=None, *, dense=True, allow_sparse=False):
    """Unwrap FeatureMatrix, validate finiteness and column count."""
    if hasattr(X, "values") and hasattr(X, "norm_state"):
        X = X.values
    if sp.issparse(X):
        if allow_sparse:
            X = sp.csr_matrix(X, dtype=np.float64)
            data = X.data
        else:
            X = X.toarray()
            data = X
    else:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise ShapeMismatch(f"expected a 2-D matrix, got {X.ndim} dimensions")
        data = X
    if not np.all(np.isfinite(data)):
        raise NonFiniteInput("feature matrix contains NaN or infinite values")
    if n_features is not None and X.shape[1] != n_features:
        raise ShapeMismatch(f"model expects {n_features} features, got {X.shape[1]}")
    return X


def check_labels(y, n_rows=None, *, require_both=True) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim != 1:
        raise ShapeMismatch("labels must be one-dimensional")
    if n_rows is not None and y.shape[0] != n_rows:
        raise ShapeMismatch(f"{n_rows} rows but {y.shape[0]} labels")
    if not np.all((y == 0) | (y == 1)):
        raise DegenerateLabels("labels must be binary 0/1")
    y = y.astype(np.int64)
    if require_both and (y.min() == y.max()):
        raise DegenerateLabels(f"only class {int(y[0])} present")
    return y


class Classifier:
    """Mixin: subclasses provide ``decision_scores``, ``predict_proba`` and ``threshold``.

    A row is labelled 1 only when its score is strictly above the threshold,
    so an exact tie falls to class 0.
    """

    kind = "abstract"
    threshold: float

    def decision_scores(self, X) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def predict_proba(self, X) -> np.ndarray:  # pragma: no cover - interface
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        return (self.decision_scores(X) > self.threshold).astype(np.int64)

    def with_threshold(self, threshold: float):
        return dataclasses.replace(self, threshold=float(threshold))

    # persistence -----------------------------------------------------------
    def hyperparams(self) -> dict:
        return {}

    def parameters(self) -> dict:  # pragma: no cover - interface
        raise NotImplementedError

    @classmethod
    def from_parameters(cls, hyperparams: dict, parameters: dict):  # pragma: no cover
        raise NotImplementedError


def two_column(p1) -> np.ndarray:
    p1 = np.asarray(p1, dtype=np.float64)
    return np.column_stack([1.0 - p1, p1])
