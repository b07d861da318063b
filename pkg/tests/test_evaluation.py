import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from parsitext.errors import InvalidFraction, InvalidK, ShapeMismatch, TargetUnreachable, UndefinedRoc
from parsitext.evaluation import (
    ConfusionCounts,
    accuracy,
    candidate_thresholds,
    confusion,
    cross_validate,
    grid_search,
    learning_curve,
    mann_whitney_auc,
    precision_recall_f1,
    roc_auc,
    stratified_folds,
    stratified_holdout,
    tune_threshold,
    tune_threshold_scores,
)
from parsitext.learners import LearnerSpec
from parsitext.models import train_linear

from conftest import two_blobs

labels = st.lists(st.integers(0, 1), min_size=1, max_size=60)


def brute_pair_auc(y, s):
    pos = [v for v, t in zip(s, y) if t == 1]
    neg = [v for v, t in zip(s, y) if t == 0]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


class TestMetrics:
    def test_formula_example(self):
        c = ConfusionCounts(tp=3, fp=1, tn=4, fn=2)
        prf = precision_recall_f1(c)
        assert prf.precision == 0.75
        assert prf.recall == 0.6
        assert prf.f1 == pytest.approx(2 * 0.75 * 0.6 / 1.35, abs=1e-15)
        assert accuracy(c) == 0.7

    def test_perfect(self):
        c = confusion([0, 1, 1, 0], [0, 1, 1, 0])
        assert tuple(precision_recall_f1(c))[:3] == (1.0, 1.0, 1.0)
        assert accuracy(c) == 1.0

    def test_no_positive_predictions(self):
        prf = precision_recall_f1(confusion([1, 0, 1], [0, 0, 0]))
        assert prf.precision == 0.0 and prf.recall == 0.0
        assert "precision" in prf.degenerate

    def test_length_mismatch(self):
        with pytest.raises(ShapeMismatch):
            confusion([0, 1], [0])

    @given(st.data())
    def test_counts_match_brute_force(self, data):
        y = data.draw(labels)
        p = data.draw(st.lists(st.integers(0, 1), min_size=len(y), max_size=len(y)))
        c = confusion(y, p)
        assert c.tp == sum(a == 1 and b == 1 for a, b in zip(y, p))
        assert c.fp == sum(a == 0 and b == 1 for a, b in zip(y, p))
        assert c.tn == sum(a == 0 and b == 0 for a, b in zip(y, p))
        assert c.fn == sum(a == 1 and b == 0 for a, b in zip(y, p))
        assert c.total == len(y)
        prf = precision_recall_f1(c)
        if prf.precision > 0 and prf.recall > 0:
            assert 1 / prf.f1 == pytest.approx((1 / prf.precision + 1 / prf.recall) / 2, rel=1e-12)


class TestRoc:
    def test_perfect_and_anti_ranked(self):
        assert roc_auc([0, 0, 1, 1], [0.1, 0.2, 0.8, 0.9]).auc == 1.0
        assert roc_auc([1, 1, 0, 0], [0.1, 0.2, 0.8, 0.9]).auc == 0.0

    def test_pair_counting_example(self):
        y, s = [1, 0, 1, 0], [0.9, 0.8, 0.7, 0.1]
        assert roc_auc(y, s).auc == 0.75
        assert brute_pair_auc(y, s) == 0.75

    def test_single_class(self):
        with pytest.raises(UndefinedRoc):
            roc_auc([1, 1], [0.2, 0.3])

    def test_points_shape(self):
        curve = roc_auc([0, 1, 0, 1, 1], [0.3, 0.3, 0.1, 0.9, 0.5])
        assert curve.points[0] == (0.0, 0.0, float("inf"))
        assert curve.points[-1][:2] == (1.0, 1.0)
        assert (np.diff(curve.thresholds) < 0).all()

    @given(st.data())
    def test_auc_equals_mann_whitney(self, data):
        y = data.draw(st.lists(st.integers(0, 1), min_size=2, max_size=200))
        if min(y) == max(y):
            y[0] = 1 - y[0]
        s = data.draw(st.lists(st.integers(0, 12).map(lambda v: v / 4), min_size=len(y), max_size=len(y)))
        curve = roc_auc(y, s)
        assert abs(curve.auc - mann_whitney_auc(y, s)) <= 1e-12
        assert curve.auc == pytest.approx(brute_pair_auc(y, s), abs=1e-12)
        assert (np.diff(curve.fpr) >= 0).all() and (np.diff(curve.tpr) >= 0).all()


class TestFolds:
    def test_leave_one_out(self):
        folds = stratified_folds(np.array([0, 1] * 5), 10)
        assert [len(f) for f in folds] == [1] * 10

    def test_invalid_k(self):
        with pytest.raises(InvalidK):
            stratified_folds(np.zeros(4), 5)
        with pytest.raises(InvalidK):
            stratified_folds(np.zeros(4), 1)

    @given(st.lists(st.integers(0, 1), min_size=2, max_size=80), st.integers(2, 12), st.integers(0, 99))
    def test_partition_and_stratification(self, y, k, seed):
        y = np.array(y)
        if k > len(y):
            return
        folds = stratified_folds(y, k, seed)
        joined = np.concatenate(folds)
        assert sorted(joined) == list(range(len(y)))
        sizes = [len(f) for f in folds]
        assert max(sizes) - min(sizes) <= 1
        for c in (0, 1):
            per = [int((y[f] == c).sum()) for f in folds]
            assert max(per) - min(per) <= 1

    def test_constant_learner_matches_majority_fraction(self, blobs):
        X, y = blobs
        y = y.copy()
        y[:5] = 1  # 25 positives, 15 negatives
        cv = cross_validate("majority", X, y, k=5, seed=2)
        for f, idx in enumerate(cv.fold_indices):
            assert cv.per_fold[f]["accuracy"] == pytest.approx(float((y[idx] == 1).mean()))

    def test_result_fields(self, blobs):
        cv = cross_validate(LearnerSpec("lda"), *blobs, k=4, seed=0)
        assert cv.k == 4
        assert cv.mean["f1"] == 1.0
        assert cv.std["f1"] == 0.0
        assert set(cv.to_dict()) >= {"k", "per_fold", "mean", "std", "seed"}


class TestHoldoutAndCurves:
    def test_holdout_counts(self):
        y = np.r_[np.zeros(60, int), np.ones(40, int)]
        train, test = stratified_holdout(y, 0.2, seed=0)
        assert len(test) == 20
        assert (y[test] == 1).sum() == 8
        assert np.intersect1d(train, test).size == 0

    def test_holdout_bad_fraction(self):
        with pytest.raises(InvalidFraction):
            stratified_holdout(np.zeros(10), 1.0)

    def test_full_fraction_reproduces_plain_split(self, blobs):
        X, y = blobs
        curve = learning_curve("logistic", X, y, train_fractions=(1.0,), seed=3)
        train, held = stratified_holdout(y, 0.2, seed=3)
        model = LearnerSpec("logistic").fit(X[train], y[train], seed=3)
        assert curve.points[0].size == len(train)
        assert curve.points[0].val == float((model.predict(X[held]) == y[held]).mean())

    def test_memorizing_learner(self, rng):
        X = rng.random((50, 3))
        y = rng.integers(0, 2, 50)
        spec = LearnerSpec("forest", {"n_trees": 3, "bootstrap": False, "max_features": None})
        curve = learning_curve(spec, X, y, train_fractions=(0.2, 0.5, 1.0))
        assert all(p.train == 1.0 for p in curve.points)

    def test_high_capacity_gap_exceeds_linear_gap(self, rng):
        X, y = two_blobs(n_per_class=50, d=5, gap=1.0, seed=4)
        flip = rng.choice(100, 10, replace=False)
        y[flip] = 1 - y[flip]
        deep = learning_curve(LearnerSpec("forest", {"n_trees": 5, "bootstrap": False, "max_features": None}),
                              X, y, seed=1)
        linear = learning_curve(LearnerSpec("logistic", {"l2_lambda": 0.1}), X, y, seed=1)
        assert deep.final_gap >= linear.final_gap
        assert deep.mean_gap >= linear.mean_gap

    def test_bad_fraction(self, blobs):
        with pytest.raises(InvalidFraction):
            learning_curve("logistic", *blobs, train_fractions=(0.0,))

    def test_explicit_validation(self, blobs):
        X, y = blobs
        curve = learning_curve("lda", X, y, train_fractions=(0.5,), validation=(X[:4], y[:4]))
        assert curve.points[0].size == 20


def exhaustive_threshold(y, s, metric, target):
    """Scan every distinct prediction set; recall target -> largest t, precision -> smallest t."""
    y, s = np.asarray(y), np.asarray(s, dtype=float)
    u = np.unique(s)
    grid = sorted({u[0] - 1.0, u[-1] + 1.0, *((u[:-1] + u[1:]) / 2)})
    ok = []
    for t in grid:
        pred = s > t
        tp = int((pred & (y == 1)).sum())
        rec = tp / max(int((y == 1).sum()), 1)
        prec = tp / int(pred.sum()) if pred.sum() else 0.0
        if (rec if metric == "recall" else prec) >= target:
            ok.append(t)
    if not ok:
        return None
    return max(ok) if metric == "recall" else min(ok)


class TestThreshold:
    def fixture(self):
        rng = np.random.default_rng(11)
        y = np.r_[np.ones(10, int), np.zeros(10, int)]
        s = np.r_[rng.normal(1.0, 1.0, 10), rng.normal(-1.0, 1.0, 10)]
        return y, s

    @pytest.mark.parametrize("metric,target", [("recall", 0.91), ("recall", 0.5), ("precision", 0.9), ("precision", 0.7)])
    def test_matches_exhaustive_scan(self, metric, target):
        y, s = self.fixture()
        res = tune_threshold_scores(y, s, (metric, target))
        assert res.threshold == exhaustive_threshold(y, s, metric, target)
        assert getattr(res, metric) >= target

    def test_recall_one_threshold_below_min_positive(self):
        y, s = self.fixture()
        res = tune_threshold_scores(y, s, ("recall", 1.0))
        assert res.threshold <= s[y == 1].min()
        assert res.recall == 1.0

    def test_recall_zero_allows_nothing_positive(self):
        y, s = self.fixture()
        res = tune_threshold_scores(y, s, ("recall", 0.0))
        assert res.threshold > s.max()
        assert "precision" in res.degenerate

    def test_unreachable(self):
        with pytest.raises(TargetUnreachable):
            tune_threshold_scores([1, 0, 1, 0], [0.1, 0.9, 0.2, 0.8], ("precision", 0.9))

    def test_candidates_separate_every_distinct_score(self):
        s = np.array([0.3, 0.1, 0.3, 0.7])
        c = candidate_thresholds(s)
        sets = {tuple(s > t) for t in c}
        assert len(sets) == len(c) == 4

    def test_model_level(self, blobs):
        X, y = blobs
        model = train_linear(X, y, loss="logistic")
        res = tune_threshold(model, X, y, ("recall", 0.91))
        tuned = model.with_threshold(res.threshold)
        assert (tuned.predict(X)[y == 1]).mean() >= 0.91

    @given(st.lists(st.integers(0, 1), min_size=2, max_size=40), st.integers(0, 10**6))
    def test_recall_and_positives_monotone(self, y, seed):
        y = np.array(y)
        s = np.random.default_rng(seed).random(len(y))
        if y.sum() == 0:
            return
        recalls, positives = [], []
        for t in candidate_thresholds(s):
            pred = (s > t).astype(int)
            recalls.append(precision_recall_f1(confusion(y, pred)).recall)
            positives.append(int(pred.sum()))
        assert all(a >= b for a, b in zip(recalls, recalls[1:]))
        assert all(a >= b for a, b in zip(positives, positives[1:]))


def test_grid_search_picks_best(blobs):
    X, y = blobs
    out = grid_search("logistic", {"l2_lambda": [1e-4, 1e6]}, X, y, k=3)
    assert out["best_params"]["l2_lambda"] == 1e-4
    assert len(out["results"]) == 2


def test_exhaustive_oracle_is_exhaustive():
    # the oracle itself agrees with a dense sweep over a fine grid
    y = np.array([1, 0, 1, 1, 0])
    s = np.array([0.9, 0.4, 0.4, 0.2, 0.1])
    fine = np.linspace(-1, 2, 3001)
    best = max(t for t in fine if ((s > t) & (y == 1)).sum() / 3 >= 0.6)
    t = exhaustive_threshold(y, s, "recall", 0.6)
    assert set(itertools.compress(y, s > t)) == set(itertools.compress(y, s > best))
    assert_array_equal(s > t, s > best)
    assert_allclose(t, 0.3)
