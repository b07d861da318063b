"""Multinomial and Gaussian naive Bayes for binary labels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp

from ..errors import NegativeFeature
from .base import Classifier, check_labels, check_X

__all__ = ["NaiveBayesModel", "train_gnb", "train_mnb"]


@dataclass
class NaiveBayesModel(Classifier):
    """``variant`` is 'multinomial' or 'gaussian'.

    Multinomial models keep per-class log-probabilities in ``feature_log_prob``;
    gaussian models keep ``theta`` (means) and ``var``.  ``offset`` (multinomial
    only) is subtracted from inputs so that centred features become counts.
    """

    variant: str
    class_log_prior: np.ndarray
    threshold: float = 0.5
    alpha: float = 1.0
    feature_log_prob: Optional[np.ndarray] = None
    offset: Optional[np.ndarray] = None
    theta: Optional[np.ndarray] = None
    var: Optional[np.ndarray] = None
    var_floor: float = 1e-9

    @property
    def kind(self):
        return "mnb" if self.variant == "multinomial" else "gnb"

    @property
    def n_features(self) -> int:
        ref = self.feature_log_prob if self.variant == "multinomial" else self.theta
        return ref.shape[1]

    def joint_log_likelihood(self, X) -> np.ndarray:
        if self.variant == "multinomial":
            X = _shifted(check_X(X, self.n_features, allow_sparse=True), self.offset)
            if (X.data if sp.issparse(X) else X).min(initial=0.0) < 0:
                raise NegativeFeature("multinomial naive Bayes needs non-negative features")
            return np.asarray(X @ self.feature_log_prob.T) + self.class_log_prior
        X = check_X(X, self.n_features)
        out = np.empty((X.shape[0], 2))
        for c in range(2):
            out[:, c] = (
                self.class_log_prior[c]
                - 0.5 * np.sum(np.log(2.0 * np.pi * self.var[c]))
                - 0.5 * np.sum((X - self.theta[c]) ** 2 / self.var[c], axis=1)
            )
        return out

    def predict_log_proba(self, X) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        return jll - logsumexp(jll, axis=1, keepdims=True)

    def predict_proba(self, X) -> np.ndarray:
        return np.exp(self.predict_log_proba(X))

    def decision_scores(self, X) -> np.ndarray:
        return self.predict_proba(X)[:, 1]

    def hyperparams(self):
        if self.variant == "multinomial":
            return {"variant": self.variant, "alpha": self.alpha, "shift": self.offset is not None}
        return {"variant": self.variant, "var_floor": self.var_floor}

    def parameters(self):
        doc = {"class_log_prior": self.class_log_prior.tolist(), "threshold": self.threshold}
        if self.variant == "multinomial":
            doc["feature_log_prob"] = self.feature_log_prob.tolist()
            doc["offset"] = None if self.offset is None else self.offset.tolist()
        else:
            doc["theta"] = self.theta.tolist()
            doc["var"] = self.var.tolist()
        return doc

    @classmethod
    def from_parameters(cls, hyperparams, parameters):
        arr = lambda key: None if parameters.get(key) is None else np.asarray(parameters[key], dtype=np.float64)  # noqa: E731
        return cls(
            variant=hyperparams["variant"],
            class_log_prior=arr("class_log_prior"),
            threshold=float(parameters["threshold"]),
            alpha=float(hyperparams.get("alpha", 1.0)),
            feature_log_prob=arr("feature_log_prob"),
            offset=arr("offset"),
            theta=arr("theta"),
            var=arr("var"),
            var_floor=float(hyperparams.get("var_floor", 1e-9)),
        )


def _shifted(X, offset):
    if offset is None:
        return X
    dense = X.toarray() if sp.issparse(X) else X
    return np.maximum(dense - offset, 0.0)


def _class_log_prior(y):
    counts = np.bincount(y, minlength=2).astype(np.float64)
    return np.log(counts / counts.sum())


def train_mnb(X, y, alpha: float = 1.0, shift: bool = False) -> NaiveBayesModel:
    """Multinomial NB with additive (Laplace) smoothing on per-class feature totals.

    ``shift=True`` subtracts each column's training minimum (when negative)
    first, which lets the model sit on top of PCA output.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    X = check_X(X, allow_sparse=True)
    y = check_labels(y, X.shape[0])
    offset = None
    if shift:
        col_min = np.asarray(X.min(axis=0).todense()).ravel() if sp.issparse(X) else X.min(axis=0)
        offset = np.minimum(col_min, 0.0)
        X = _shifted(X, offset)
    if (X.data if sp.issparse(X) else X).min(initial=0.0) < 0:
        raise NegativeFeature("multinomial naive Bayes needs non-negative features")
    totals = np.vstack([np.asarray(X[y == c].sum(axis=0)).ravel() for c in range(2)])
    smoothed = totals + alpha
    with np.errstate(divide="ignore"):
        flp = np.log(smoothed) - np.log(smoothed.sum(axis=1, keepdims=True))
    return NaiveBayesModel(
        variant="multinomial",
        class_log_prior=_class_log_prior(y),
        alpha=alpha,
        feature_log_prob=flp,
        offset=offset,
    )


def train_gnb(X, y, var_floor: float = 1e-9) -> NaiveBayesModel:
    X = check_X(X)
    y = check_labels(y, X.shape[0])
    theta = np.vstack([X[y == c].mean(axis=0) for c in range(2)])
    var = np.vstack([X[y == c].var(axis=0) for c in range(2)])
    return NaiveBayesModel(
        variant="gaussian",
        class_log_prior=_class_log_prior(y),
        theta=theta,
        var=np.maximum(var, var_floor),
        var_floor=var_floor,
    )
