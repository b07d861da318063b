"""Binary classifiers sharing the ``predict`` / ``decision_scores`` / ``predict_proba`` contract."""

from .base import Classifier, check_labels, check_X, sigmoid
from .bayes import NaiveBayesModel, train_gnb, train_mnb
from .lda import LdaModel, MajorityModel, fisher_criterion, train_lda, train_majority
from .linear import LinearModel, hinge_objective, logistic_objective, train_linear
from .tree import ForestModel, TreeModel, build_tree, train_random_forest, train_stump, weighted_gini

__all__ = [
    "Classifier",
    "ForestModel",
    "LdaModel",
    "LinearModel",
    "MajorityModel",
    "NaiveBayesModel",
    "TreeModel",
    "build_tree",
    "check_X",
    "check_labels",
    "fisher_criterion",
    "hinge_objective",
    "logistic_objective",
    "sigmoid",
    "train_gnb",
    "train_lda",
    "train_linear",
    "train_majority",
    "train_mnb",
    "train_random_forest",
    "train_stump",
    "weighted_gini",
]
