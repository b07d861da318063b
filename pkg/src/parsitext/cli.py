"""Command-line interface: ``parsitext <command> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import ParsitextError

log = logging.getLogger("parsitext")


# --------------------------------------------------------------------------- helpers


def _load_config(args):
    from .pipeline import ExperimentConfig, preset

    if args.config:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if getattr(args, "preset", None):
            doc.setdefault("name", args.preset)
        cfg = ExperimentConfig.from_dict(doc)
    else:
        cfg = preset(getattr(args, "preset", None) or "paper-default")
    if args.seed is not None:
        cfg = cfg.with_overrides({"seed": args.seed})
    return cfg


def _feature_overrides(args) -> dict:
    over = {}
    for flag, key in (("unit", "unit"), ("n", "n"), ("kmeans", "kmeans_k"), ("cluster_features", "cluster_features")):
        value = getattr(args, flag, None)
        if value is not None:
            over[f"features.{key}"] = value
    if getattr(args, "pca", None) is not None:
        over["features.pca"] = None if args.pca <= 0 else args.pca
    if getattr(args, "no_pca", False):
        over["features.pca"] = None
    if getattr(args, "select", False):
        over["features.selection"] = True
    return over


def _learner_overrides(args) -> dict:
    over = {}
    if getattr(args, "learner", None):
        over["learner"] = {"kind": args.learner, "params": json.loads(args.params) if args.params else {}}
    elif getattr(args, "params", None):
        over["learner.params"] = json.loads(args.params)
    return over


def _dataset(args, cfg):
    from .dataset import load_dataset
    from .pipeline import dataset_from_config

    if getattr(args, "data", None):
        label_map = json.loads(args.label_map) if args.label_map else None
        return load_dataset(args.data, args.format, args.text_col, args.label_col, label_map)
    return dataset_from_config(cfg)


def _out_dir(args, default: Optional[str] = None) -> Optional[Path]:
    out = args.out or default
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit(obj, args, filename: Optional[str] = None):
    text = json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)
    out = _out_dir(args)
    if out is not None and filename:
        (out / filename).write_text(text + "\n", encoding="utf-8")
    print(text)


def _stdin_lines():
    data = sys.stdin.buffer.read().decode("utf-8")
    if data.startswith("\ufeff"):
        data = data[1:]
    return data.splitlines()


# --------------------------------------------------------------------------- commands


def cmd_normalize(args) -> int:
    from .text_norm import load_table, normalize, transliterate_fenglish

    table = load_table(args.table, args.affixes) if (args.table or args.affixes) else None
    for line in _stdin_lines():
        text = transliterate_fenglish(line, norm_table=table) if args.fenglish else normalize(line, table).text
        sys.stdout.write(text + "\n")
    return 0


def cmd_tokenize(args) -> int:
    from .text_norm import load_table
    from .tokenizer import load_stemmer_rules, load_stopwords, preprocess

    table = load_table(args.table, args.affixes) if (args.table or args.affixes) else None
    stopwords = frozenset() if args.no_stopwords else load_stopwords(args.stopwords, table)
    rules = load_stemmer_rules(args.stem_rules) if args.stem_rules else None
    for line in _stdin_lines():
        stream = preprocess(line, table=table, stopwords=stopwords, rules=rules, do_stem=not args.no_stem)
        sys.stdout.write(" ".join(stream.tokens) + "\n")
    return 0


def cmd_featurize(args) -> int:
    from .features import dump_matrix
    from .pipeline import Featurizer, _Cleaner

    overrides = _feature_overrides(args)
    overrides["features.tfidf"] = bool(args.tfidf)
    if args.pca is None:
        overrides["features.pca"] = None
    cfg = _load_config(args).with_overrides(overrides)
    ds = _dataset(args, cfg)
    cleaner = _Cleaner(cfg.text)
    streams = [cleaner(t) for t in ds.texts]
    _, X = Featurizer.fit(streams, ds.labels, cfg.features, seed=cfg.seed)
    text = dump_matrix(X)
    out = _out_dir(args)
    if out is not None:
        (out / "features.txt").write_text(text, encoding="utf-8")
        (out / "feature_names.txt").write_text("\n".join(X.feature_names or []) + "\n", encoding="utf-8")
        log.info("wrote %d x %d matrix to %s", X.rows, X.cols, out)
    else:
        sys.stdout.write(text)
    return 0


def cmd_train(args) -> int:
    from .persistence import save_model
    from .pipeline import config_hash

    cfg = _load_config(args).with_overrides({**_feature_overrides(args), **_learner_overrides(args)})
    ds = _dataset(args, cfg)
    clf = cfg.pipeline.fit(ds.texts, ds.labels, seed=cfg.seed)
    clf.meta.update({"config_hash": config_hash(cfg), "seed": cfg.seed})
    out = _out_dir(args, ".")
    save_model(clf, out / "model.json")
    print(out / "model.json")
    return 0


def cmd_evaluate(args) -> int:
    from .evaluation import evaluate_predictions, roc_auc
    from .persistence import load_model

    cfg = _load_config(args)
    model = load_model(args.model)
    ds = _dataset(args, cfg)
    scores = model.decision_scores(ds.texts)
    report = evaluate_predictions(ds.labels, (scores > model.threshold).astype(int), scores)
    report["threshold"] = model.threshold
    report["n_docs"] = len(ds)
    out = _out_dir(args)
    if out is not None and report.get("auc") is not None:
        from .pipeline import _write_csv
        from .plotting import plot_roc

        roc = roc_auc(ds.labels, scores)
        stamp = f"model={Path(args.model).name} seed={cfg.seed}"
        _write_csv(out / "roc.csv", ("fpr", "tpr", "threshold"), roc.points, stamp)
        plot_roc(roc, out / "roc.svg", title=f"ROC (AUC {roc.auc:.4f})", stamp=stamp)
    _emit(report, args, "evaluation.json")
    return 0


def cmd_cv(args) -> int:
    from .evaluation import cross_validate

    cfg = _load_config(args).with_overrides({**_feature_overrides(args), **_learner_overrides(args)})
    ds = _dataset(args, cfg)
    k = args.k or cfg.eval.cv_folds or 10
    result = cross_validate(cfg.pipeline, ds.texts, ds.labels, k=k, seed=cfg.seed)
    _emit(result.to_dict(), args, "cv.json")
    return 0


def cmd_learning_curve(args) -> int:
    from .evaluation import learning_curve
    from .pipeline import _write_csv
    from .plotting import plot_learning_curve

    cfg = _load_config(args).with_overrides({**_feature_overrides(args), **_learner_overrides(args)})
    ds = _dataset(args, cfg)
    fractions = [float(f) for f in args.fractions.split(",")] if args.fractions else cfg.eval.curve_fractions
    curve = learning_curve(cfg.pipeline, ds.texts, ds.labels, fractions, seed=cfg.seed,
                           metric=args.metric or cfg.eval.curve_metric)
    out = _out_dir(args)
    if out is not None:
        stamp = f"seed={cfg.seed}"
        _write_csv(out / "learning_curve.csv", ("size", "train", "val"),
                   [(p.size, p.train, p.val) for p in curve.points], stamp)
        plot_learning_curve(curve, out / "learning_curve.svg", stamp=stamp)
    _emit(curve.to_dict(), args, "learning_curve.json")
    return 0


def cmd_tune_threshold(args) -> int:
    from .evaluation import tune_threshold
    from .persistence import load_model, save_model

    cfg = _load_config(args)
    model = load_model(args.model)
    ds = _dataset(args, cfg)
    result = tune_threshold(model, ds.texts, ds.labels, (args.metric, args.target))
    doc = {
        "metric": args.metric,
        "target": args.target,
        "threshold": result.threshold,
        "precision": result.precision,
        "recall": result.recall,
        "degenerate": sorted(result.degenerate),
    }
    if args.save:
        save_model(model.with_threshold(result.threshold), args.save)
    _emit(doc, args, "threshold.json")
    return 0


def cmd_synth(args) -> int:
    from .dataset import write_dataset
    from .synth import generate_synthetic_corpus

    seed = 0 if args.seed is None else args.seed
    ds = generate_synthetic_corpus(args.n, seed, args.noise)
    if args.out:
        path = Path(args.out)
        if path.suffix.lower() not in (".tsv", ".csv"):
            path.mkdir(parents=True, exist_ok=True)
            path = path / "synthetic.tsv"
        write_dataset(ds, path)
        print(path)
    else:
        for doc_id, text, label in zip(ds.doc_ids, ds.texts, ds.labels):
            sys.stdout.write(f"{doc_id}\t{text}\t{int(label)}\n")
    return 0


def cmd_run(args) -> int:
    from .pipeline import run_experiment

    over = {**_feature_overrides(args), **_learner_overrides(args)}
    if args.synthetic is not None:
        over["dataset"] = {"synthetic": {"n_docs": args.synthetic, "noise": args.noise}}
    if args.cv is not None:
        over["eval.cv_folds"] = args.cv
    if args.recall_target is not None:
        over["eval.threshold_metric"] = "recall"
        over["eval.threshold_target"] = args.recall_target
    cfg = _load_config(args).with_overrides(over)
    ds = _dataset(args, cfg) if args.data else None
    out = _out_dir(args, "out")
    report = run_experiment(cfg, ds, out, figures=not args.no_figures)
    test = report["test"]
    print(f"wrote {out}: test F1 {test['f1']:.4f}  AUC {test['auc']:.4f}  (config {report['config_hash']})")
    return 0


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="master random seed")
    common.add_argument("--config", metavar="PATH", help="JSON file of config keys (dotted keys allowed)")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("-v", "--verbose", action="count", default=0)

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--data", metavar="PATH", help="UTF-8 CSV/TSV with text,label columns")
    data.add_argument("--format", choices=("csv", "tsv"), help="override the suffix-based format guess")
    data.add_argument("--text-col", default="text")
    data.add_argument("--label-col", default="label")
    data.add_argument("--label-map", metavar="JSON", help='e.g. \'{"pos": 1, "neg": 0}\'')

    tables = argparse.ArgumentParser(add_help=False)
    tables.add_argument("--table", metavar="PATH", help="normalization table (SRC<TAB>DST hex)")
    tables.add_argument("--affixes", metavar="PATH", help="affix list, one per line")

    feats = argparse.ArgumentParser(add_help=False)
    feats.add_argument("--preset", help="named experiment preset (default paper-default)")
    feats.add_argument("--unit", choices=("word", "char"))
    feats.add_argument("--n", type=int)
    feats.add_argument("--pca", type=float, metavar="RATIO", help="variance ratio to keep; 0 disables")
    feats.add_argument("--kmeans", type=int, metavar="K")
    feats.add_argument("--cluster-features", choices=("distances", "centers", "combined"))
    feats.add_argument("--select", action="store_true", help="forest-importance feature selection")

    learn = argparse.ArgumentParser(add_help=False)
    learn.add_argument("--learner", help="svm, logistic, mnb, gnb, forest, lda, stump, voting, pasting, adaboost")
    learn.add_argument("--params", metavar="JSON", help="learner hyperparameters")

    parser = argparse.ArgumentParser(prog="parsitext", description="Persian text classification toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", parents=[common, tables], help="normalize stdin lines")
    p.add_argument("--fenglish", action="store_true", help="transliterate Latin-script Persian first")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("tokenize", parents=[common, tables], help="normalize and tokenize stdin lines")
    p.add_argument("--stopwords", metavar="PATH")
    p.add_argument("--stem-rules", metavar="PATH")
    p.add_argument("--no-stem", action="store_true")
    p.add_argument("--no-stopwords", action="store_true")
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("featurize", parents=[common, data, feats], help="dump a feature matrix")
    p.add_argument("--tfidf", action="store_true")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", parents=[common, data, feats, learn], help="fit a pipeline and save model.json")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", parents=[common, data], help="score a saved model on a dataset")
    p.add_argument("--model", required=True, metavar="PATH")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("cv", parents=[common, data, feats, learn], help="stratified k-fold cross-validation")
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("learning-curve", parents=[common, data, feats, learn], help="train/validation curve")
    p.add_argument("--fractions", help="comma-separated training fractions")
    p.add_argument("--metric", choices=("accuracy", "f1", "precision", "recall", "auc"))
    p.set_defaults(func=cmd_learning_curve)

    p = sub.add_parser("tune-threshold", parents=[common, data], help="choose a decision threshold")
    p.add_argument("--model", required=True, metavar="PATH")
    p.add_argument("--metric", choices=("recall", "precision"), default="recall")
    p.add_argument("--target", type=float, default=0.91)
    p.add_argument("--save", metavar="PATH", help="write the model with the tuned threshold")
    p.set_defaults(func=cmd_tune_threshold)

    p = sub.add_parser("synth", parents=[common], help="write the synthetic corpus")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--noise", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("run", parents=[common, data, feats, learn], help="full experiment into --out")
    p.add_argument("--synthetic", type=int, metavar="N", help="use an N-document synthetic corpus")
    p.add_argument("--noise", type=float, default=0.0, help="label noise for --synthetic")
    p.add_argument("--cv", type=int, metavar="K", help="cross-validation folds (0 disables)")
    p.add_argument("--recall-target", type=float, help="also tune the threshold for this recall")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ParsitextError as exc:
        print(f"parsitext: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"parsitext: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
