"""Text-to-prediction pipelines and the end-to-end experiment runner.

A :class:`PipelineSpec` bundles text cleaning options, a feature recipe and a
learner.  Fitting it on raw documents yields a :class:`TextClassifier` whose
every stateful transform (vocabulary, idf, PCA, KMeans, column mask) was
estimated on the training documents alone.
"""

from __future__ import annotations

import copy
import csv
import hashlib
import json
import logging
import re
import time
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

import numpy as np

from .dataset import Dataset, load_dataset, split_train_test
from .errors import StageError
from .evaluation import (
    cross_validate,
    evaluate_predictions,
    learning_curve,
    roc_auc,
    tune_threshold,
)
from .features import (
    FeatureMatrix,
    KMeansModel,
    PcaModel,
    Vocabulary,
    build_vocabulary,
    cluster_center_features,
    cluster_distance_features,
    combine_features,
    count_matrix,
    kmeans_fit,
    pca_fit,
    pca_transform,
    select_features_by_importance,
    tfidf_fit_transform,
    tfidf_transform,
)
from .learners import LearnerSpec
from .models.base import Classifier
from .persistence import model_from_document, model_to_document, save_model
from .text_norm import load_table, transliterate_fenglish
from .tokenizer import load_stemmer_rules, load_stopwords, preprocess

__all__ = [
    "EvalSpec",
    "ExperimentConfig",
    "FeatureSpec",
    "Featurizer",
    "PipelineSpec",
    "TextClassifier",
    "TextOptions",
    "config_hash",
    "dataset_from_config",
    "preset",
    "run_experiment",
]

log = logging.getLogger(__name__)

CLUSTER_MODES = ("distances", "centers", "combined")


# --------------------------------------------------------------------------- option records


@dataclass(frozen=True)
class TextOptions:
    """Cleaning chain settings; ``None`` paths mean the bundled data files."""

    stem: bool = True
    remove_stopwords: bool = True
    fenglish: bool = False
    table: Optional[str] = None
    affixes: Optional[str] = None
    stopwords: Optional[str] = None
    stem_rules: Optional[str] = None


@dataclass(frozen=True)
class FeatureSpec:
    unit: str = "word"
    n: int = 1
    min_df: int = 1
    tfidf: bool = True
    pca: Optional[float] = 0.99
    kmeans_k: Optional[int] = None
    cluster_features: str = "distances"
    kmeans_space: str = "pca"
    selection: bool = False
    selection_threshold: Union[str, float] = "mean"

    def __post_init__(self):
        if self.unit not in ("word", "char"):
            raise ValueError("unit must be 'word' or 'char'")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.cluster_features not in CLUSTER_MODES:
            raise ValueError(f"cluster_features must be one of {CLUSTER_MODES}")
        if self.kmeans_space not in ("pca", "tfidf"):
            raise ValueError("kmeans_space must be 'pca' or 'tfidf'")


@dataclass(frozen=True)
class EvalSpec:
    test_fraction: float = 0.2
    cv_folds: int = 10
    curve_fractions: tuple = (0.1, 0.25, 0.5, 0.75, 1.0)
    curve_metric: str = "accuracy"
    threshold_metric: Optional[str] = None
    threshold_target: Optional[float] = None


# --------------------------------------------------------------------------- text cleaning


class _Cleaner:
    """Resolved tables for one TextOptions value."""

    _LATIN = re.compile(r"[A-Za-z]+")

    def __init__(self, options: TextOptions):
        self.options = options
        self.table = load_table(options.table, options.affixes) if (options.table or options.affixes) else None
        if options.remove_stopwords:
            self.stopwords = load_stopwords(options.stopwords, self.table)
        else:
            self.stopwords = frozenset()
        self.rules = load_stemmer_rules(options.stem_rules) if options.stem_rules else None

    def __call__(self, raw: str):
        if self.options.fenglish and self._LATIN.search(raw):
            raw = self._LATIN.sub(lambda m: transliterate_fenglish(m.group(0), norm_table=self.table), raw)
        return preprocess(raw, table=self.table, stopwords=self.stopwords, rules=self.rules,
                          do_stem=self.options.stem)


# --------------------------------------------------------------------------- featurizer


@dataclass
class Featurizer:
    """Fitted feature recipe: vocabulary, optional PCA, KMeans and column mask."""

    spec: FeatureSpec
    vocab: Vocabulary
    pca: Optional[PcaModel] = None
    kmeans: Optional[KMeansModel] = None
    mask: Optional[np.ndarray] = None

    @classmethod
    def fit(cls, streams: Sequence, y, spec: FeatureSpec, seed: int = 0) -> tuple:
        """Fit on training token streams; returns (featurizer, training matrix)."""
        vocab = build_vocabulary(streams, spec.unit, spec.n, spec.min_df)
        base = tfidf_fit_transform(streams, vocab) if spec.tfidf else count_matrix(streams, vocab)
        fz = cls(spec, vocab)
        if spec.pca is not None:
            fz.pca = pca_fit(base, spec.pca)
        if spec.kmeans_k is not None:
            space = fz._reduced(base) if spec.kmeans_space == "pca" else base
            fz.kmeans = kmeans_fit(space, spec.kmeans_k, seed=seed)
        X = fz._assemble(base)
        if spec.selection:
            fz.mask = select_features_by_importance(X, y, spec.selection_threshold, seed=seed)
            X = fz._apply_mask(X)
        return fz, X

    def _reduced(self, base: FeatureMatrix) -> FeatureMatrix:
        return pca_transform(base, self.pca) if self.pca is not None else base

    def _assemble(self, base: FeatureMatrix) -> FeatureMatrix:
        reduced = self._reduced(base)
        if self.kmeans is None:
            return reduced
        space = reduced if self.spec.kmeans_space == "pca" else base
        mode = self.spec.cluster_features
        if mode == "distances":
            return cluster_distance_features(space, self.kmeans)
        if mode == "centers":
            return cluster_center_features(space, self.kmeans)
        return combine_features(
            cluster_distance_features(space, self.kmeans),
            cluster_center_features(space, self.kmeans),
            reduced,
        )

    def _apply_mask(self, X: FeatureMatrix) -> FeatureMatrix:
        if self.mask is None:
            return X
        cols = np.nonzero(self.mask)[0]
        names = None if X.feature_names is None else [X.feature_names[i] for i in cols]
        values = X.values[:, cols]
        return FeatureMatrix(values, names, X.norm_state)

    def transform(self, streams: Sequence) -> FeatureMatrix:
        base = tfidf_transform(list(streams), self.vocab) if self.spec.tfidf else count_matrix(streams, self.vocab)
        return self._apply_mask(self._assemble(base))

    @property
    def n_output_features(self) -> int:
        if self.mask is not None:
            return int(self.mask.sum())
        return self.transform([()]).cols

    def to_dict(self) -> dict:
        return {
            "spec": asdict(self.spec),
            "vocab": self.vocab.to_dict(),
            "pca": None if self.pca is None else self.pca.to_dict(),
            "kmeans": None if self.kmeans is None else self.kmeans.to_dict(),
            "mask": None if self.mask is None else [bool(v) for v in self.mask],
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Featurizer":
        return cls(
            spec=FeatureSpec(**doc["spec"]),
            vocab=Vocabulary.from_dict(doc["vocab"]),
            pca=None if doc.get("pca") is None else PcaModel.from_dict(doc["pca"]),
            kmeans=None if doc.get("kmeans") is None else KMeansModel.from_dict(doc["kmeans"]),
            mask=None if doc.get("mask") is None else np.asarray(doc["mask"], dtype=bool),
        )


# --------------------------------------------------------------------------- text classifier


@dataclass
class TextClassifier(Classifier):
    """Raw documents in, labels out.  ``threshold`` applies to the inner model's scores."""

    text: TextOptions
    featurizer: Featurizer
    model: Any
    threshold: float
    meta: dict = field(default_factory=dict)

    kind = "pipeline"

    def __post_init__(self):
        self._cleaner = _Cleaner(self.text)

    def features(self, docs: Sequence[str]) -> FeatureMatrix:
        return self.featurizer.transform([self._cleaner(d) for d in docs])

    def decision_scores(self, docs) -> np.ndarray:
        return self.model.decision_scores(self.features(docs))

    def predict_proba(self, docs) -> np.ndarray:
        return self.model.predict_proba(self.features(docs))

    def hyperparams(self):
        return {"text": asdict(self.text), "meta": dict(self.meta)}

    def parameters(self):
        return {
            "featurizer": self.featurizer.to_dict(),
            "model": model_to_document(self.model),
            "threshold": self.threshold,
        }

    @classmethod
    def from_parameters(cls, hyperparams, parameters):
        return cls(
            text=TextOptions(**hyperparams["text"]),
            featurizer=Featurizer.from_dict(parameters["featurizer"]),
            model=model_from_document(parameters["model"]),
            threshold=float(parameters["threshold"]),
            meta=dict(hyperparams.get("meta") or {}),
        )


@dataclass(frozen=True)
class PipelineSpec:
    """Fit-able description of clean -> featurize -> learn, usable wherever a LearnerSpec is."""

    text: TextOptions = TextOptions()
    features: FeatureSpec = FeatureSpec()
    learner: LearnerSpec = LearnerSpec("svm")

    def fit(self, docs: Sequence[str], y, seed: int = 0) -> TextClassifier:
        cleaner = _Cleaner(self.text)
        streams = [cleaner(d) for d in docs]
        y = np.asarray(y)
        featurizer, X = Featurizer.fit(streams, y, self.features, seed=seed)
        model = self.learner.fit(X, y, seed=seed)
        return TextClassifier(self.text, featurizer, model, float(model.threshold))


# --------------------------------------------------------------------------- configuration


@dataclass
class ExperimentConfig:
    name: str = "paper-default"
    seed: int = 0
    text: TextOptions = field(default_factory=TextOptions)
    features: FeatureSpec = field(default_factory=FeatureSpec)
    learner: LearnerSpec = field(default_factory=lambda: LearnerSpec("svm"))
    eval: EvalSpec = field(default_factory=EvalSpec)
    dataset: dict = field(default_factory=dict)

    @property
    def pipeline(self) -> PipelineSpec:
        return PipelineSpec(self.text, self.features, self.learner)

    def to_dict(self) -> dict:
        ev = asdict(self.eval)
        ev["curve_fractions"] = list(ev["curve_fractions"])
        return {
            "name": self.name,
            "seed": self.seed,
            "text": asdict(self.text),
            "features": asdict(self.features),
            "learner": self.learner.to_dict(),
            "eval": ev,
            "dataset": copy.deepcopy(self.dataset),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ExperimentConfig":
        base = preset(doc.get("name", "paper-default")).to_dict()
        merged = _deep_merge(base, _undot(doc))
        _reject_unknown(merged)
        ev = dict(merged["eval"])
        ev["curve_fractions"] = tuple(ev["curve_fractions"])
        return cls(
            name=merged["name"],
            seed=int(merged["seed"]),
            text=TextOptions(**merged["text"]),
            features=FeatureSpec(**merged["features"]),
            learner=LearnerSpec.from_dict(merged["learner"]),
            eval=EvalSpec(**ev),
            dataset=dict(merged["dataset"]),
        )

    def with_overrides(self, overrides: Mapping) -> "ExperimentConfig":
        doc = _deep_merge(self.to_dict(), _undot(overrides))
        return ExperimentConfig.from_dict(doc)


def _undot(doc: Mapping) -> dict:
    """Expand ``{"features.n": 3}`` into ``{"features": {"n": 3}}``."""
    out: dict = {}
    for key, value in doc.items():
        parts = key.split(".")
        node = out
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        if isinstance(value, Mapping) and not (parts[-1] in ("params",) or key == "dataset"):
            node[parts[-1]] = _deep_merge(node.get(parts[-1], {}), _undot(value))
        else:
            node[parts[-1]] = value
    return out


def _deep_merge(base: Mapping, update: Mapping) -> dict:
    out = copy.deepcopy(dict(base))
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), Mapping) and key != "params":
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _reject_unknown(doc: Mapping):
    known = {"name", "seed", "text", "features", "learner", "eval", "dataset"}
    extra = set(doc) - known
    if extra:
        raise ValueError(f"unknown config keys: {sorted(extra)}")
    for key, record in (("text", TextOptions), ("features", FeatureSpec), ("eval", EvalSpec)):
        allowed = {f.name for f in fields(record)}
        bad = set(doc[key]) - allowed
        if bad:
            raise ValueError(f"unknown {key} options: {sorted(bad)}")


PRESETS = {
    # clean -> word unigram TF-IDF -> PCA 0.99 -> SGD linear SVM
    "paper-default": {},
    "char-unigram": {"features": {"unit": "char"}},
    "word-bigram": {"features": {"n": 2}},
    "word-trigram": {"features": {"n": 3}},
    "voting": {"learner": {"kind": "voting", "params": {}}},
}


def preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    cfg = ExperimentConfig(name=name)
    overrides = PRESETS[name]
    if not overrides:
        return cfg
    doc = _deep_merge(cfg.to_dict(), overrides)
    ev = dict(doc["eval"])
    ev["curve_fractions"] = tuple(ev["curve_fractions"])
    return ExperimentConfig(
        name=name,
        seed=doc["seed"],
        text=TextOptions(**doc["text"]),
        features=FeatureSpec(**doc["features"]),
        learner=LearnerSpec.from_dict(doc["learner"]),
        eval=EvalSpec(**ev),
        dataset=doc["dataset"],
    )


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(canonical_json(config.to_dict()).encode("utf-8")).hexdigest()[:16]


def dataset_from_config(config: ExperimentConfig) -> Dataset:
    """Load the dataset a config names: a file path or the synthetic generator."""
    spec = dict(config.dataset)
    if spec.get("path"):
        return load_dataset(
            spec["path"],
            format=spec.get("format"),
            text_col=spec.get("text_col", "text"),
            label_col=spec.get("label_col", "label"),
            label_map=spec.get("label_map"),
        )
    from .synth import generate_synthetic_corpus

    synth = spec.get("synthetic", {})
    return generate_synthetic_corpus(
        int(synth.get("n_docs", 2000)), int(synth.get("seed", config.seed)), float(synth.get("noise", 0.0))
    )


# --------------------------------------------------------------------------- experiment


class _Stage:
    """Context manager tagging any failure with the stage it happened in."""

    def __init__(self, name: str, timings: dict):
        self.name = name
        self.timings = timings

    def __enter__(self):
        self.start = time.perf_counter()
        log.info("stage %s", self.name)
        return self

    def __exit__(self, exc_type, exc, tb):
        self.timings[self.name] = time.perf_counter() - self.start
        if exc is not None and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def _write_csv(path: Path, header: Sequence[str], rows, stamp: str):
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {stamp}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, float):
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return v


def run_experiment(
    config: ExperimentConfig,
    ds: Optional[Dataset] = None,
    out_dir: Union[str, Path, None] = None,
    figures: bool = True,
) -> dict:
    """Split, fit on the training side, evaluate on the test side and write artifacts.

    Returns the report dictionary.  Wall-clock timings are logged but kept out
    of the report so identical inputs give byte-identical files.
    """
    timings: dict = {}
    seed = config.seed
    chash = config_hash(config)
    stamp = f"config_hash={chash} seed={seed}"
    out = Path(out_dir) if out_dir is not None else None

    with _Stage("load", timings):
        ds = ds if ds is not None else dataset_from_config(config)
    with _Stage("split", timings):
        ds = split_train_test(ds, config.eval.test_fraction, stratified=True, seed=seed)
        train, test = ds.train(), ds.test()
    pipeline = config.pipeline
    with _Stage("train", timings):
        clf = pipeline.fit(train.texts, train.labels, seed=seed)
        clf.meta.update({"config_hash": chash, "seed": seed})
    with _Stage("evaluate", timings):
        train_scores = clf.decision_scores(train.texts)
        train_metrics = evaluate_predictions(train.labels, (train_scores > clf.threshold).astype(int), train_scores)
        test_scores = clf.decision_scores(test.texts)
        test_pred = (test_scores > clf.threshold).astype(int)
        test_metrics = evaluate_predictions(test.labels, test_pred, test_scores)
        roc = roc_auc(test.labels, test_scores)

    report: dict = {
        "config_hash": chash,
        "seed": seed,
        "config_name": config.name,
        "dataset": {
            "n_docs": len(ds),
            "n_train": len(train),
            "n_test": len(test),
            "n_positive": int(ds.labels.sum()),
            "provenance": {k: v for k, v in ds.provenance.items()},
        },
        "features": {
            "unit": config.features.unit,
            "n": config.features.n,
            "vocabulary_size": len(clf.featurizer.vocab),
            "pca_components": None if clf.featurizer.pca is None else clf.featurizer.pca.n_components,
            "pca_retained_ratio": None if clf.featurizer.pca is None else clf.featurizer.pca.retained_ratio,
            "kmeans_k": None if clf.featurizer.kmeans is None else clf.featurizer.kmeans.k,
            "selected_features": None if clf.featurizer.mask is None else int(clf.featurizer.mask.sum()),
        },
        "learner": config.learner.to_dict(),
        "threshold": clf.threshold,
        "train": train_metrics,
        "test": test_metrics,
        "roc": {"auc": roc.auc, "n_points": len(roc.points)},
    }

    if config.eval.cv_folds:
        with _Stage("cv", timings):
            cv = cross_validate(pipeline, train.texts, train.labels, k=config.eval.cv_folds, seed=seed)
            report["cv"] = cv.to_dict()

    curve = None
    if config.eval.curve_fractions:
        with _Stage("learning_curve", timings):
            curve = learning_curve(
                pipeline,
                train.texts,
                train.labels,
                config.eval.curve_fractions,
                seed=seed,
                metric=config.eval.curve_metric,
                validation=(test.texts, test.labels),
            )
            report["learning_curve"] = curve.to_dict()

    if config.eval.threshold_metric:
        with _Stage("threshold", timings):
            target = (config.eval.threshold_metric, float(config.eval.threshold_target))
            tuned = tune_threshold(clf, test.texts, test.labels, target)
            report["tuned_threshold"] = {
                "metric": target[0],
                "target": target[1],
                "threshold": tuned.threshold,
                "precision": tuned.precision,
                "recall": tuned.recall,
                "degenerate": sorted(tuned.degenerate),
            }

    if out is not None:
        with _Stage("persist", timings):
            out.mkdir(parents=True, exist_ok=True)
            save_model(clf, out / "model.json")
            _write_csv(out / "roc.csv", ("fpr", "tpr", "threshold"), roc.points, stamp)
            curve_rows = [] if curve is None else [(p.size, p.train, p.val) for p in curve.points]
            _write_csv(out / "learning_curve.csv", ("size", "train", "val"), curve_rows, stamp)
            resolved = config.to_dict()
            resolved["config_hash"] = chash
            (out / "config.resolved.json").write_text(
                json.dumps(resolved, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
            )
            artifacts = ["model.json", "report.json", "roc.csv", "learning_curve.csv", "config.resolved.json"]
            if figures:
                from .plotting import plot_learning_curve, plot_roc

                plot_roc(roc, out / "roc.svg", title=f"ROC (AUC {roc.auc:.4f})", stamp=stamp)
                artifacts.append("roc.svg")
                if curve is not None:
                    plot_learning_curve(curve, out / "learning_curve.svg", stamp=stamp)
                    artifacts.append("learning_curve.svg")
            report["artifacts"] = artifacts
            (out / "report.json").write_text(
                json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
            )
    for name, secs in timings.items():
        log.info("%-15s %.2fs", name, secs)
    return report

