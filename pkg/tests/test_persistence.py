import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from parsitext.errors import CorruptModel, UnknownSchema
from parsitext.learners import LEARNERS, LearnerSpec
from parsitext.persistence import SCHEMA_VERSION, dumps_model, load_model, loads_model, save_model

from conftest import two_blobs

FAST_PARAMS = {
    "forest": {"n_trees": 5},
    "mnb": {"shift": True},
    "pasting": {"base": "logistic", "n_estimators": 2, "sample_size": 20},
    "adaboost": {"n_rounds": 5},
    "voting": {"members": ["svm", "gnb", "lda"]},
}


@pytest.mark.parametrize("kind", sorted(LEARNERS))
def test_round_trip_predictions(kind, tmp_path):
    X, y = two_blobs(n_per_class=20, d=3, gap=2.0, seed=1)
    model = LearnerSpec(kind, FAST_PARAMS.get(kind, {})).fit(X, y, seed=0)
    path = save_model(model, tmp_path / "m.json")
    back = load_model(path)
    rows = np.random.default_rng(0).normal(0, 2, (100, 3))
    assert_array_equal(back.predict(rows), model.predict(rows))
    assert_array_equal(back.decision_scores(rows), model.decision_scores(rows))
    assert dumps_model(back) == dumps_model(model)


def test_document_shape():
    X, y = two_blobs()
    doc = json.loads(dumps_model(LearnerSpec("svm").fit(X, y)))
    assert set(doc) == {"schema_version", "model_kind", "hyperparams", "parameters"}
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["model_kind"] == "svm"


def test_truncated_file(tmp_path):
    X, y = two_blobs()
    path = save_model(LearnerSpec("logistic").fit(X, y), tmp_path / "m.json")
    text = path.read_text(encoding="utf-8")
    path.write_text(text[: len(text) // 2], encoding="utf-8")
    with pytest.raises(CorruptModel):
        load_model(path)


def test_unknown_schema(tmp_path):
    X, y = two_blobs()
    doc = json.loads(dumps_model(LearnerSpec("logistic").fit(X, y)))
    doc["schema_version"] = 999
    with pytest.raises(UnknownSchema):
        loads_model(json.dumps(doc))


@pytest.mark.parametrize("text", ["[]", '{"schema_version": 1, "model_kind": "nope"}',
                                  '{"schema_version": 1, "model_kind": "svm", "hyperparams": {}, "parameters": {}}'])
def test_malformed_documents(text):
    with pytest.raises(CorruptModel):
        loads_model(text)


def test_floats_survive_exactly():
    X, y = two_blobs(seed=9)
    model = LearnerSpec("logistic").fit(X, y)
    back = loads_model(dumps_model(model))
    assert back.weights.tobytes() == model.weights.tobytes()
