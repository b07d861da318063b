"""Two-class Fisher linear discriminant, plus the constant majority baseline."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InsufficientData
from .base import Classifier, check_labels, check_X, sigmoid, two_column

__all__ = ["LdaModel", "MajorityModel", "fisher_criterion", "train_lda", "train_majority"]


@dataclass
class LdaModel(Classifier):
    """Scores are signed distances ``x.w - midpoint`` along the Fisher direction."""

    means: np.ndarray  # (2, d)
    scatter: np.ndarray  # pooled within-class scatter, ridge not included
    w: np.ndarray
    midpoint: float
    projected_std: float
    ridge: float = 1e-6
    threshold: float = 0.0

    kind = "lda"

    def decision_scores(self, X) -> np.ndarray:
        X = check_X(X, self.w.shape[0], allow_sparse=True)
        return np.asarray(X @ self.w).ravel() - self.midpoint

    def predict_proba(self, X) -> np.ndarray:
        return two_column(sigmoid(self.decision_scores(X) / self.projected_std))

    def hyperparams(self):
        return {"ridge": self.ridge}

    def parameters(self):
        return {
            "means": self.means.tolist(),
            "scatter": self.scatter.tolist(),
            "w": self.w.tolist(),
            "midpoint": self.midpoint,
            "projected_std": self.projected_std,
            "threshold": self.threshold,
        }

    @classmethod
    def from_parameters(cls, hyperparams, parameters):
        w = np.asarray(parameters["w"], dtype=np.float64)
        d = w.shape[0]
        return cls(
            means=np.asarray(parameters["means"], dtype=np.float64).reshape(2, d),
            scatter=np.asarray(parameters["scatter"], dtype=np.float64).reshape(d, d),
            w=w,
            midpoint=float(parameters["midpoint"]),
            projected_std=float(parameters["projected_std"]),
            ridge=float(hyperparams["ridge"]),
            threshold=float(parameters["threshold"]),
        )


def fisher_criterion(w, means, scatter) -> float:
    """Between-class over within-class spread of the projection onto ``w``."""
    w = np.asarray(w, dtype=np.float64)
    between = float(w @ (means[1] - means[0])) ** 2
    return between / float(w @ scatter @ w)


def train_lda(X, y, ridge: float = 1e-6) -> LdaModel:
    """w = (S_W + ridge*I)^-1 (mu1 - mu0); decision threshold at the projected-means midpoint."""
    X = check_X(X)
    y = check_labels(y, X.shape[0])
    counts = np.bincount(y, minlength=2)
    if counts.min() < 2:
        raise InsufficientData("LDA needs at least two samples per class")
    means = np.vstack([X[y == c].mean(axis=0) for c in range(2)])
    d = X.shape[1]
    scatter = np.zeros((d, d))
    for c in range(2):
        centred = X[y == c] - means[c]
        scatter += centred.T @ centred
    w = np.linalg.solve(scatter + ridge * np.eye(d), means[1] - means[0])
    projected = means @ w
    midpoint = float(projected.mean())
    within = float(w @ scatter @ w) / max(len(y) - 2, 1)
    projected_std = float(np.sqrt(within)) if within > 0 else 1.0
    return LdaModel(means, scatter, w, midpoint, projected_std, ridge)


@dataclass
class MajorityModel(Classifier):
    """Always predicts the training majority (ties to class 0)."""

    p1: float
    threshold: float = 0.5

    kind = "majority"

    def predict_proba(self, X) -> np.ndarray:
        X = check_X(X, allow_sparse=True)
        return two_column(np.full(X.shape[0], self.p1))

    def decision_scores(self, X) -> np.ndarray:
        return self.predict_proba(X)[:, 1]

    def parameters(self):
        return {"p1": self.p1, "threshold": self.threshold}

    @classmethod
    def from_parameters(cls, hyperparams, parameters):
        return cls(float(parameters["p1"]), float(parameters["threshold"]))


def train_majority(X, y) -> MajorityModel:
    X = check_X(X, allow_sparse=True)
    y = check_labels(y, X.shape[0], require_both=False)
    return MajorityModel(float(y.mean()))
