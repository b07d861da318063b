"""Declarative learner specs: a kind name plus hyperparameters, fitted on demand.

A ``LearnerSpec`` is the unit that cross-validation, learning curves, pasting
and the CLI pass around, so every learner gets constructed the same way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from .ensemble import train_adaboost, train_pasting, train_voting
from .models.bayes import train_gnb, train_mnb
from .models.lda import train_lda, train_majority
from .models.linear import train_linear
from .models.tree import build_tree, train_random_forest, train_stump

__all__ = ["ALIASES", "LEARNERS", "LearnerSpec", "as_spec"]


def _fit_tree(X, y, seed, **params):
    from .models.base import check_labels, check_X

    X = check_X(X)
    y = check_labels(y, X.shape[0])
    return build_tree(X, y, None, seed=seed, **params)


def _fit_voting(X, y, seed, members=None):
    return train_voting(members, X, y, seed=seed)


def _fit_pasting(X, y, seed, base=None, **params):
    return train_pasting(base, X, y, seed=seed, **params)


LEARNERS: dict[str, Callable[..., Any]] = {
    "svm": lambda X, y, seed, **p: train_linear(X, y, loss="hinge", seed=seed, **p),
    "logistic": lambda X, y, seed, **p: train_linear(X, y, loss="logistic", seed=seed, **p),
    "mnb": lambda X, y, seed, **p: train_mnb(X, y, **p),
    "gnb": lambda X, y, seed, **p: train_gnb(X, y, **p),
    "forest": lambda X, y, seed, **p: train_random_forest(X, y, seed=seed, **p),
    "tree": _fit_tree,
    "lda": lambda X, y, seed, **p: train_lda(X, y, **p),
    "stump": lambda X, y, seed, **p: train_stump(X, y, **p),
    "majority": lambda X, y, seed, **p: train_majority(X, y),
    "voting": _fit_voting,
    "pasting": _fit_pasting,
    "adaboost": lambda X, y, seed, **p: train_adaboost(X, y, seed=seed, **p),
}

# table abbreviations commonly used for the same learners
ALIASES = {"lg": "logistic", "lr": "logistic", "rnd": "forest", "rf": "forest", "sgd-svm": "svm"}


@dataclass(frozen=True)
class LearnerSpec:
    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        kind = ALIASES.get(self.kind.lower(), self.kind.lower())
        if kind not in LEARNERS:
            raise ValueError(f"unknown learner {self.kind!r}; choose from {sorted(LEARNERS)}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", dict(self.params))

    def fit(self, X, y, seed: int = 0):
        params = dict(self.params)
        if self.kind == "voting" and params.get("members") is not None:
            params["members"] = [as_spec(m) for m in params["members"]]
        if self.kind == "pasting" and params.get("base") is not None:
            params["base"] = as_spec(params["base"])
        return LEARNERS[self.kind](X, y, seed, **params)

    def to_dict(self) -> dict:
        params = {}
        for key, value in self.params.items():
            if isinstance(value, LearnerSpec):
                value = value.to_dict()
            elif isinstance(value, (list, tuple)) and value and all(isinstance(v, LearnerSpec) for v in value):
                value = [v.to_dict() for v in value]
            params[key] = value
        return {"kind": self.kind, "params": params}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "LearnerSpec":
        return cls(doc["kind"], doc.get("params") or {})


def as_spec(obj) -> LearnerSpec:
    """Accept a LearnerSpec, a kind string, or a ``{kind, params}`` mapping."""
    if isinstance(obj, LearnerSpec):
        return obj
    if isinstance(obj, str):
        return LearnerSpec(obj)
    if isinstance(obj, Mapping):
        return LearnerSpec.from_dict(obj)
    raise TypeError(f"cannot interpret {obj!r} as a learner spec")
