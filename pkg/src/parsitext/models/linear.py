"""SGD-trained linear classifiers: logistic regression and the L2 hinge-loss SVM."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .base import Classifier, check_labels, check_X, sigmoid, two_column

__all__ = ["LinearModel", "logistic_objective", "hinge_objective", "train_linear"]

ETA0 = 0.1
EPOCHS = 50
L2_LAMBDA = 1e-4


@dataclass
class LinearModel(Classifier):
    """``loss='logistic'`` scores are probabilities (threshold 0.5),
    ``loss='hinge'`` scores are raw margins (threshold 0.0)."""

    weights: np.ndarray
    bias: float
    loss: str
    l2_lambda: float
    threshold: float
    margin_scale: float = 1.0
    epochs: int = EPOCHS
    eta0: float = ETA0
    seed: int = 0
    objective_history: list = field(default_factory=list, repr=False)

    @property
    def kind(self):
        return "svm" if self.loss == "hinge" else "logistic"

    def margin(self, X) -> np.ndarray:
        X = check_X(X, self.weights.shape[0], allow_sparse=True)
        return np.asarray(X @ self.weights).ravel() + self.bias

    def decision_scores(self, X) -> np.ndarray:
        m = self.margin(X)
        return sigmoid(m) if self.loss == "logistic" else m

    def predict_proba(self, X) -> np.ndarray:
        m = self.margin(X)
        if self.loss == "logistic":
            return two_column(sigmoid(m))
        # hinge margins have no probability; rescale [-scale, scale] onto [0, 1]
        return two_column(np.clip(0.5 + m / (2.0 * self.margin_scale), 0.0, 1.0))

    def hyperparams(self):
        return {
            "loss": self.loss,
            "l2_lambda": self.l2_lambda,
            "epochs": self.epochs,
            "eta0": self.eta0,
            "seed": self.seed,
        }

    def parameters(self):
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "threshold": self.threshold,
            "margin_scale": self.margin_scale,
        }

    @classmethod
    def from_parameters(cls, hyperparams, parameters):
        return cls(
            weights=np.asarray(parameters["weights"], dtype=np.float64),
            bias=float(parameters["bias"]),
            loss=hyperparams["loss"],
            l2_lambda=float(hyperparams["l2_lambda"]),
            threshold=float(parameters["threshold"]),
            margin_scale=float(parameters["margin_scale"]),
            epochs=int(hyperparams["epochs"]),
            eta0=float(hyperparams["eta0"]),
            seed=int(hyperparams["seed"]),
        )


def _sigmoid1(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def logistic_objective(w, b, X, y, l2_lambda):
    """Mean log-loss plus ``l2_lambda/2 * ||w||^2`` and its gradient (w, b)."""
    X = check_X(X, allow_sparse=True)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(X @ w).ravel() + b
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2_lambda * float(w @ w)
    residual = (sigmoid(z) - y) / len(y)
    grad_w = np.asarray(X.T @ residual).ravel() + l2_lambda * w
    return float(loss), grad_w, float(residual.sum())


def hinge_objective(w, b, X, y, l2_lambda) -> float:
    X = check_X(X, allow_sparse=True)
    signed = 2.0 * np.asarray(y, dtype=np.float64) - 1.0
    z = np.asarray(X @ w).ravel() + b
    return float(np.mean(np.maximum(0.0, 1.0 - signed * z)) + 0.5 * l2_lambda * float(w @ w))


def train_linear(
    X,
    y,
    loss: str = "hinge",
    l2_lambda: float = L2_LAMBDA,
    epochs: int = EPOCHS,
    eta0: float = ETA0,
    seed: int = 0,
) -> LinearModel:
    """Per-sample SGD with step ``eta0 / (1 + l2_lambda * t)`` and a proximal L2 shrink.

    The intercept is unregularized and starts at the optimum of the
    intercept-only model, so a heavily regularized fit falls back to the
    majority class.
    """
    if loss not in ("hinge", "logistic"):
        raise ValueError(f"loss must be 'hinge' or 'logistic', got {loss!r}")
    X = check_X(X, allow_sparse=True)
    y = check_labels(y, X.shape[0])
    if sp.issparse(X):
        X = X.toarray()
    n, d = X.shape
    signed = 2.0 * y - 1.0
    prior = y.mean()

    w = np.zeros(d)
    b = float(np.log(prior / (1.0 - prior))) if loss == "logistic" else float(2.0 * prior - 1.0)
    objective = logistic_objective if loss == "logistic" else hinge_objective

    def current():
        value = objective(w, b, X, y, l2_lambda)
        return value[0] if isinstance(value, tuple) else value

    history = [current()]
    rng = np.random.default_rng(seed)
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            eta = eta0 / (1.0 + l2_lambda * t)
            xi = X[i]
            z = float(xi @ w) + b
            if loss == "hinge":
                if signed[i] * z < 1.0:
                    w += (eta * signed[i]) * xi
                    b += eta * signed[i]
            else:
                g = _sigmoid1(z) - y[i]
                w -= (eta * g) * xi
                b -= eta * g
            # implicit L2 step: stays a contraction for every eta * lambda
            w /= 1.0 + eta * l2_lambda
            t += 1
        history.append(current())

    margins = X @ w + b
    scale = float(np.max(np.abs(margins))) or 1.0
    return LinearModel(
        weights=w,
        bias=b,
        loss=loss,
        l2_lambda=l2_lambda,
        threshold=0.5 if loss == "logistic" else 0.0,
        margin_scale=scale,
        epochs=epochs,
        eta0=eta0,
        seed=seed,
        objective_history=history,
    )
