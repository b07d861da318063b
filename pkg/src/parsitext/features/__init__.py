"""Text features: n-grams, TF-IDF, PCA, KMeans-derived columns and selection."""

from .clustering import (
    DEFAULT_K,
    KMeansModel,
    assign_clusters,
    cluster_center_features,
    cluster_distance_features,
    combine_features,
    kmeans_fit,
    select_k_by_silhouette,
    silhouette_score,
)
from .decomposition import PcaModel, pca_fit, pca_inverse_transform, pca_transform
from .selection import select_features_by_importance
from .text import (
    FeatureMatrix,
    Vocabulary,
    build_vocabulary,
    count_matrix,
    dump_matrix,
    extract_ngrams,
    load_matrix,
    tfidf_fit_transform,
    tfidf_transform,
    tfidf_weight,
)

__all__ = [
    "DEFAULT_K",
    "FeatureMatrix",
    "KMeansModel",
    "PcaModel",
    "Vocabulary",
    "assign_clusters",
    "build_vocabulary",
    "cluster_center_features",
    "cluster_distance_features",
    "combine_features",
    "count_matrix",
    "dump_matrix",
    "extract_ngrams",
    "kmeans_fit",
    "load_matrix",
    "pca_fit",
    "pca_inverse_transform",
    "pca_transform",
    "select_features_by_importance",
    "select_k_by_silhouette",
    "silhouette_score",
    "tfidf_fit_transform",
    "tfidf_transform",
    "tfidf_weight",
]
