import io
import json
import sys

import pytest

from parsitext.cli import main
from parsitext.text_norm import ZWNJ


def feed(monkeypatch, text):
    monkeypatch.setattr(sys, "stdin", io.TextIOWrapper(io.BytesIO(text.encode("utf-8")), encoding="utf-8"))


@pytest.fixture(scope="module")
def corpus_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "corpus.tsv"
    assert main(["synth", "--n", "120", "--noise", "0.05", "--seed", "2", "--out", str(path)]) == 0
    return path


def test_normalize(monkeypatch, capsys):
    feed(monkeypatch, "\ufeffكتاب ها\nخ\u0640وب\n")
    assert main(["normalize"]) == 0
    assert capsys.readouterr().out == "کتاب" + ZWNJ + "ها\nخوب\n"


def test_normalize_fenglish(monkeypatch, capsys):
    feed(monkeypatch, "khob\n")
    assert main(["normalize", "--fenglish"]) == 0
    assert capsys.readouterr().out == "خوب\n"


def test_tokenize(monkeypatch, capsys):
    feed(monkeypatch, "كتابهاي خوب و بد!\n")
    assert main(["tokenize"]) == 0
    assert capsys.readouterr().out == "کتاب خوب بد\n"
    feed(monkeypatch, "كتابهاي خوب و بد!\n")
    assert main(["tokenize", "--no-stem", "--no-stopwords"]) == 0
    assert capsys.readouterr().out.split() == ["کتاب" + ZWNJ + "های", "خوب", "و", "بد"]


def test_featurize(corpus_path, tmp_path):
    out = tmp_path / "feat"
    assert main(["featurize", "--data", str(corpus_path), "--tfidf", "--out", str(out)]) == 0
    header = (out / "features.txt").read_text(encoding="utf-8").splitlines()[0].split()
    assert header[0] == "120" and header[2] == "tfidf"


def test_train_evaluate_tune(corpus_path, tmp_path, capsys):
    out = tmp_path / "model"
    assert main(["train", "--data", str(corpus_path), "--learner", "logistic", "--out", str(out)]) == 0
    model = out / "model.json"
    assert model.exists()
    capsys.readouterr()
    assert main(["evaluate", "--data", str(corpus_path), "--model", str(model), "--out", str(out)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["f1"] > 0.8
    assert (out / "roc.svg").exists() and (out / "roc.csv").exists()
    tuned = tmp_path / "tuned.json"
    assert main(["tune-threshold", "--data", str(corpus_path), "--model", str(model),
                 "--target", "0.95", "--save", str(tuned)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["recall"] >= 0.95
    assert tuned.exists()


def test_cv_and_learning_curve(corpus_path, tmp_path, capsys):
    assert main(["cv", "--data", str(corpus_path), "--k", "3", "--learner", "mnb", "--pca", "0"]) == 0
    assert json.loads(capsys.readouterr().out)["k"] == 3
    out = tmp_path / "lc"
    assert main(["learning-curve", "--data", str(corpus_path), "--fractions", "0.5,1.0", "--out", str(out)]) == 0
    assert len(json.loads(capsys.readouterr().out)["points"]) == 2
    assert (out / "learning_curve.svg").exists()


def test_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["run", "--synthetic", "100", "--seed", "1", "--cv", "0", "--out", str(out)]) == 0
    for name in ("model.json", "report.json", "roc.csv", "learning_curve.csv", "config.resolved.json",
                 "roc.svg", "learning_curve.svg"):
        assert (out / name).exists(), name


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"features.n": 2, "features.pca": None, "eval.cv_folds": 0,
                               "eval.curve_fractions": [], "dataset": {"synthetic": {"n_docs": 60}}}))
    out = tmp_path / "run"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--no-figures"]) == 0
    resolved = json.loads((out / "config.resolved.json").read_text(encoding="utf-8"))
    assert resolved["features"]["n"] == 2
    assert not (out / "roc.svg").exists()


def test_errors_exit_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.tsv"
    bad.write_text("text\tlabel\nخوب\tneutral\n", encoding="utf-8")
    assert main(["train", "--data", str(bad)]) == 2
    assert "neutral" in capsys.readouterr().err
    assert main(["run", "--synthetic", "10", "--out", str(tmp_path / "x")]) == 2
    with pytest.raises(SystemExit):
        main(["no-such-command"])
