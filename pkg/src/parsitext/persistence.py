"""Versioned JSON persistence for trained models.

Every document has the shape ``{schema_version, model_kind, hyperparams,
parameters}``.  Floats are written with Python's shortest round-trip repr, so
a reloaded model reproduces the original predictions bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import CorruptModel, UnknownSchema

__all__ = ["SCHEMA_VERSION", "dumps_model", "load_model", "loads_model", "model_from_document",
           "model_to_document", "save_model"]

SCHEMA_VERSION = 1


def _registry():
    from .ensemble import EnsembleModel
    from .models.bayes import NaiveBayesModel
    from .models.lda import LdaModel, MajorityModel
    from .models.linear import LinearModel
    from .models.tree import ForestModel, TreeModel
    from .pipeline import TextClassifier

    return {
        "svm": LinearModel,
        "logistic": LinearModel,
        "mnb": NaiveBayesModel,
        "gnb": NaiveBayesModel,
        "tree": TreeModel,
        "forest": ForestModel,
        "lda": LdaModel,
        "majority": MajorityModel,
        "voting": EnsembleModel,
        "pasting": EnsembleModel,
        "adaboost": EnsembleModel,
        "pipeline": TextClassifier,
    }


def model_to_document(model) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "model_kind": model.kind,
        "hyperparams": model.hyperparams(),
        "parameters": model.parameters(),
    }


def model_from_document(doc):
    if not isinstance(doc, dict):
        raise CorruptModel("model document must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise UnknownSchema(f"unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    kind = doc.get("model_kind")
    cls = _registry().get(kind)
    if cls is None:
        raise CorruptModel(f"unknown model_kind {kind!r}")
    try:
        return cls.from_parameters(doc["hyperparams"], doc["parameters"])
    except (UnknownSchema, CorruptModel):
        raise
    except (KeyError, TypeError, ValueError, IndexError, AttributeError) as exc:
        raise CorruptModel(f"malformed {kind} document: {exc!r}") from exc


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def dumps_model(model) -> str:
    return json.dumps(model_to_document(model), sort_keys=True, default=_json_default,
                      ensure_ascii=False, allow_nan=False)


def loads_model(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"not valid JSON: {exc}") from exc
    return model_from_document(doc)


def save_model(model, path) -> Path:
    path = Path(path)
    path.write_text(dumps_model(model) + "\n", encoding="utf-8")
    return path


def load_model(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise CorruptModel(f"{path}: not UTF-8") from exc
    return loads_model(text)
