"""Soft voting, pasting and discrete AdaBoost over decision stumps."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateLabels, InvalidSampleSize
from .models.base import Classifier, check_labels, check_X, sigmoid, two_column
from .models.tree import train_stump

__all__ = ["EnsembleModel", "train_adaboost", "train_pasting", "train_voting"]

log = logging.getLogger(__name__)

# a perfect stump gets the weight it would have at this error, keeping alpha finite
_MIN_ERROR = 1e-10
_MAX_REDRAWS = 100


def _take(X, idx):
    if hasattr(X, "take_rows"):
        return X.take_rows(idx)
    if isinstance(X, (list, tuple)):
        return [X[i] for i in idx]
    return X[idx]


def _n_rows(X) -> int:
    if hasattr(X, "rows"):
        return X.rows
    return X.shape[0] if hasattr(X, "shape") else len(X)


@dataclass
class EnsembleModel(Classifier):
    """``method`` is 'voting', 'pasting' or 'adaboost'.

    Voting and pasting average member probabilities (threshold 0.5);
    AdaBoost scores are ``sum(alpha_m * h_m(x))`` with h in {-1, +1}
    (threshold 0.0).
    """

    method: str
    members: list
    member_weights: np.ndarray
    threshold: float
    index_sets: Optional[list] = None
    round_errors: Optional[list] = None
    weight_sums: Optional[list] = field(default=None, repr=False)
    hyper: dict = field(default_factory=dict)

    @property
    def kind(self):
        return self.method

    def decision_scores(self, X) -> np.ndarray:
        if self.method == "adaboost":
            X = check_X(X, self.members[0].n_features)
            votes = [2.0 * m.leaf_labels(X) - 1.0 for m in self.members]
            return np.asarray(self.member_weights) @ np.asarray(votes)
        return np.mean([m.predict_proba(X)[:, 1] for m in self.members], axis=0)

    def predict_proba(self, X) -> np.ndarray:
        scores = self.decision_scores(X)
        if self.method == "adaboost":
            return two_column(sigmoid(2.0 * scores))
        return two_column(scores)

    def hyperparams(self):
        return dict(self.hyper)

    def parameters(self):
        from .persistence import model_to_document

        return {
            "members": [model_to_document(m) for m in self.members],
            "member_weights": [float(a) for a in self.member_weights],
            "threshold": self.threshold,
            "index_sets": self.index_sets,
            "round_errors": self.round_errors,
            "weight_sums": self.weight_sums,
        }

    @classmethod
    def from_parameters(cls, hyperparams, parameters, method=None):
        from .persistence import model_from_document

        return cls(
            method=method or hyperparams["method"],
            members=[model_from_document(m) for m in parameters["members"]],
            member_weights=np.asarray(parameters["member_weights"], dtype=np.float64),
            threshold=float(parameters["threshold"]),
            index_sets=parameters.get("index_sets"),
            round_errors=parameters.get("round_errors"),
            weight_sums=parameters.get("weight_sums"),
            hyper=dict(hyperparams),
        )


def default_voting_roster():
    """SVM, logistic regression, random forest, Gaussian NB and multinomial NB."""
    from .learners import LearnerSpec

    return [
        LearnerSpec("svm"),
        LearnerSpec("logistic"),
        LearnerSpec("forest"),
        LearnerSpec("gnb"),
        LearnerSpec("mnb", {"shift": True}),
    ]


def train_voting(learner_specs: Optional[Sequence] = None, X=None, y=None, seed: int = 0) -> EnsembleModel:
    """Fit every member on the full data; predictions average their probabilities."""
    from .learners import as_spec

    specs = [as_spec(s) for s in (learner_specs or default_voting_roster())]
    if not specs:
        raise ValueError("voting needs at least one member")
    members = [spec.fit(X, y, seed=seed + i) for i, spec in enumerate(specs)]
    return EnsembleModel(
        method="voting",
        members=members,
        member_weights=np.ones(len(members)),
        threshold=0.5,
        hyper={"method": "voting", "members": [s.to_dict() for s in specs], "seed": seed},
    )


def train_pasting(
    base_spec=None,
    X=None,
    y=None,
    n_estimators: int = 10,
    sample_size: int = 200,
    seed: int = 0,
) -> EnsembleModel:
    """Members trained on ``sample_size`` distinct rows drawn without replacement.

    A draw containing a single class is redrawn (deterministically, from the
    same generator), because no binary learner can fit it.
    """
    from .learners import LearnerSpec, as_spec

    spec = as_spec(base_spec) if base_spec is not None else LearnerSpec("voting")
    n = _n_rows(X)
    y = check_labels(y, n)
    if not 1 <= sample_size <= n:
        raise InvalidSampleSize(f"sample_size must lie in [1, {n}], got {sample_size}")
    rng = np.random.default_rng(seed)
    members, index_sets = [], []
    for i in range(n_estimators):
        for _ in range(_MAX_REDRAWS):
            idx = np.sort(rng.choice(n, size=sample_size, replace=False))
            if 0 < y[idx].sum() < sample_size:
                break
        else:
            raise DegenerateLabels("could not draw a sample containing both classes")
        index_sets.append([int(j) for j in idx])
        members.append(spec.fit(_take(X, idx), y[idx], seed=seed + i))
    return EnsembleModel(
        method="pasting",
        members=members,
        member_weights=np.ones(len(members)),
        threshold=0.5,
        index_sets=index_sets,
        hyper={
            "method": "pasting",
            "base": spec.to_dict(),
            "n_estimators": n_estimators,
            "sample_size": sample_size,
            "seed": seed,
        },
    )


def train_adaboost(X, y, n_rounds: int = 100, seed: int = 0, criterion: str = "gini") -> EnsembleModel:
    """Discrete AdaBoost with depth-1 trees.

    Each round fits a stump to the current weights, computes its weighted error
    e and weight ``0.5 * ln((1 - e) / e)``, then reweights and renormalizes.
    Boosting stops early when a stump is perfect (kept) or no better than
    chance (discarded).  ``seed`` is accepted for interface symmetry; stumps
    are deterministic.
    """
    X = check_X(X)
    y = check_labels(y, X.shape[0])
    signed = 2.0 * y - 1.0
    weights = np.full(len(y), 1.0 / len(y))
    stumps, alphas, errors, sums = [], [], [], []
    for _ in range(n_rounds):
        stump = train_stump(X, y, weights, criterion=criterion)
        h = 2.0 * stump.leaf_labels(X) - 1.0
        err = float(weights[h != signed].sum())
        if err >= 0.5:
            log.info("adaboost: stump error %.6f >= 0.5, stopping after %d rounds", err, len(stumps))
            break
        alpha = 0.5 * math.log((1.0 - max(err, _MIN_ERROR)) / max(err, _MIN_ERROR))
        stumps.append(stump)
        alphas.append(alpha)
        errors.append(err)
        if err <= 0.0:
            break
        weights = weights * np.exp(-alpha * signed * h)
        weights /= weights.sum()
        sums.append(float(weights.sum()))
    if not stumps:
        raise DegenerateLabels("no stump beats chance on this data")
    return EnsembleModel(
        method="adaboost",
        members=stumps,
        member_weights=np.asarray(alphas),
        threshold=0.0,
        round_errors=errors,
        weight_sums=sums,
        hyper={"method": "adaboost", "n_rounds": n_rounds, "seed": seed, "criterion": criterion},
    )
