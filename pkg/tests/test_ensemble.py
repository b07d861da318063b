import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from parsitext.ensemble import EnsembleModel, train_adaboost, train_pasting, train_voting
from parsitext.errors import DegenerateLabels, InvalidSampleSize
from parsitext.learners import LearnerSpec
from parsitext.models import MajorityModel, train_linear

from conftest import two_blobs


def xor_fixture(seed=7, n=40):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, (n, 2))
    y = ((X[:, 0] > 0) ^ (X[:, 1] > 0.3)).astype(int)
    return X, y


class TestVoting:
    def test_identical_members_equal_single_model(self, blobs):
        X, y = blobs
        single = train_linear(X, y, loss="logistic", seed=0)
        vote = EnsembleModel("voting", [single, single, single], np.ones(3), 0.5)
        assert_allclose(vote.predict_proba(X), single.predict_proba(X), atol=1e-12)
        assert_array_equal(vote.predict(X), single.predict(X))
        fitted = train_voting([LearnerSpec("logistic")], X, y, seed=0)
        assert_allclose(fitted.predict_proba(X), single.predict_proba(X), atol=1e-12)

    def test_mean_of_probabilities(self):
        members = [MajorityModel(0.1), MajorityModel(0.8)]
        vote = EnsembleModel("voting", members, np.ones(2), 0.5)
        assert_allclose(vote.predict_proba(np.zeros((1, 1))), [[0.55, 0.45]])
        assert_array_equal(vote.predict(np.zeros((1, 1))), [0])

    def test_default_roster_on_separable_fixture(self, blobs):
        X, y = blobs
        model = train_voting(None, X, y, seed=0)
        assert [m.kind for m in model.members] == ["svm", "logistic", "forest", "gnb", "mnb"]
        assert_array_equal(model.predict(X), y)

    def test_member_errors_propagate(self, blobs):
        X, y = blobs
        with pytest.raises(DegenerateLabels):
            train_voting(["logistic"], X, np.zeros_like(y))


class TestPasting:
    def test_index_sets_distinct_and_sized(self):
        X, y = two_blobs(n_per_class=150)
        model = train_pasting("logistic", X, y, n_estimators=4, sample_size=200, seed=1)
        assert len(model.members) == 4
        for idx in model.index_sets:
            assert len(idx) == 200
            assert len(set(idx)) == 200

    def test_full_sample_gives_identical_members(self, blobs):
        X, y = blobs
        model = train_pasting("lda", X, y, n_estimators=3, sample_size=len(y))
        params = [m.parameters() for m in model.members]
        assert params[0] == params[1] == params[2]

    def test_single_estimator_is_base_on_subset(self, blobs):
        X, y = blobs
        model = train_pasting("lda", X, y, n_estimators=1, sample_size=20, seed=3)
        idx = model.index_sets[0]
        base = LearnerSpec("lda").fit(X[idx], y[idx], seed=3)
        assert_allclose(model.predict_proba(X), base.predict_proba(X), atol=1e-12)

    def test_reproducible_from_seed(self, blobs):
        X, y = blobs
        a = train_pasting("logistic", X, y, n_estimators=3, sample_size=10, seed=5)
        b = train_pasting("logistic", X, y, n_estimators=3, sample_size=10, seed=5)
        c = train_pasting("logistic", X, y, n_estimators=3, sample_size=10, seed=6)
        assert a.index_sets == b.index_sets
        assert a.index_sets != c.index_sets

    def test_sample_too_large(self, blobs):
        X, y = blobs
        with pytest.raises(InvalidSampleSize):
            train_pasting("logistic", X, y, sample_size=len(y) + 1)

    def test_default_base_is_voting(self, blobs):
        X, y = blobs
        model = train_pasting(None, X, y, n_estimators=1, sample_size=30)
        assert model.members[0].kind == "voting"


class TestAdaBoost:
    def test_single_perfect_stump(self, blobs):
        model = train_adaboost(*blobs)
        assert len(model.members) == 1
        assert model.round_errors == [0.0]
        assert_array_equal(model.predict(blobs[0]), blobs[1])
        assert math.isfinite(model.member_weights[0])

    def test_exponential_training_bound(self):
        X, y = xor_fixture()
        bound = 1.0
        for m in range(1, 41):
            model = train_adaboost(X, y, n_rounds=m)
            eps = model.round_errors[-1]
            bound_m = np.prod([2 * math.sqrt(e * (1 - e)) for e in model.round_errors])
            assert eps < 0.5
            train_error = float((model.predict(X) != y).mean())
            assert train_error <= bound_m + 1e-12
            assert bound_m <= bound + 1e-12
            bound = bound_m

    def test_weights_renormalized(self):
        X, y = xor_fixture()
        model = train_adaboost(X, y, n_rounds=30)
        assert_allclose(model.weight_sums, 1.0, atol=1e-9)
        assert all(e < 0.5 for e in model.round_errors)
        assert np.isfinite(model.member_weights).all()

    def test_needs_two_classes(self, blobs):
        with pytest.raises(DegenerateLabels):
            train_adaboost(blobs[0], np.zeros_like(blobs[1]))

    def test_no_useful_stump(self):
        # perfectly balanced XOR: every stump sits at chance
        X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        y = np.array([0, 1, 1, 0])
        with pytest.raises(DegenerateLabels):
            train_adaboost(X, y)

    @given(st.integers(0, 10**5))
    def test_accepted_errors_below_half(self, seed):
        X, y = xor_fixture(seed=seed, n=30)
        if y.min() == y.max():
            return
        try:
            model = train_adaboost(X, y, n_rounds=15)
        except DegenerateLabels:
            return
        assert all(0 <= e < 0.5 for e in model.round_errors)
        assert_allclose(model.predict_proba(X).sum(axis=1), 1.0)
