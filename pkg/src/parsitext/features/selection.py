"""Keep the columns a random forest finds at least averagely important."""

from __future__ import annotations

from typing import Union

import numpy as np

from ..models.tree import train_random_forest

__all__ = ["select_features_by_importance"]


def select_features_by_importance(
    X,
    y,
    threshold: Union[str, float] = "mean",
    seed: int = 0,
    n_trees: int = 100,
    max_depth=None,
) -> np.ndarray:
    """Boolean column mask of features whose importance is >= ``threshold``.

    ``threshold='mean'`` compares against the mean importance (1/d, since
    importances are normalized).  Importances weight each node's impurity drop
    by the fraction of training samples reaching it.
    """
    forest = train_random_forest(X, y, n_trees=n_trees, max_depth=max_depth, seed=seed)
    imp = forest.feature_importances
    if threshold == "mean":
        cut = float(imp.mean())
    else:
        cut = float(threshold)
    # absorb rounding in the normalization so exactly-average columns survive
    return imp >= cut - 1e-12
