import numpy as np
import pytest
from numpy.testing import assert_array_equal
from scipy.optimize import linprog

from parsitext.dataset import Dataset, load_dataset, split_train_test, write_dataset
from parsitext.errors import (
    DegenerateLabels,
    DuplicateDocId,
    EmptyCorpus,
    InsufficientData,
    InvalidFraction,
    MalformedUtf8,
    MissingColumn,
    UnmappableLabel,
)
from parsitext.features import build_vocabulary, count_matrix
from parsitext.synth import FILLERS, NEGATIVE, POSITIVE, generate_synthetic_corpus
from parsitext.text_norm import normalize
from parsitext.tokenizer import default_stopwords, preprocess, stem

TSV = "id\ttext\tlabel\na\tفیلم خوب بود\tpos\nb\tفیلم بد بود\tneg\nc\tعالی\tpos\n"


def write(tmp_path, name, content, encoding="utf-8"):
    path = tmp_path / name
    path.write_bytes(content.encode(encoding) if isinstance(content, str) else content)
    return path


class TestLoad:
    def test_label_map(self, tmp_path):
        ds = load_dataset(write(tmp_path, "d.tsv", TSV), label_map={"pos": 1, "neg": 0})
        assert_array_equal(ds.labels, [1, 0, 1])
        assert ds.doc_ids == ["a", "b", "c"]
        assert ds.provenance["sha256"]

    def test_unmappable_label(self, tmp_path):
        path = write(tmp_path, "d.tsv", TSV + "d\tمتن\tneutral\n")
        with pytest.raises(UnmappableLabel) as info:
            load_dataset(path, label_map={"pos": 1, "neg": 0})
        assert info.value.row == 5

    def test_crlf_equals_lf(self, tmp_path):
        lf = load_dataset(write(tmp_path, "lf.tsv", TSV))
        crlf = load_dataset(write(tmp_path, "crlf.tsv", TSV.replace("\n", "\r\n")))
        assert lf == crlf

    def test_bom_tolerated(self, tmp_path):
        ds = load_dataset(write(tmp_path, "bom.tsv", b"\xef\xbb\xbf" + TSV.encode("utf-8")))
        assert len(ds) == 3

    def test_csv_format(self, tmp_path):
        ds = load_dataset(write(tmp_path, "d.csv", 'text,label\n"خوب، عالی",1\nبد,0\n'))
        assert ds.texts == ["خوب، عالی", "بد"]
        assert ds.doc_ids == ["1", "2"]

    def test_missing_column(self, tmp_path):
        with pytest.raises(MissingColumn):
            load_dataset(write(tmp_path, "d.tsv", "id\ttext\na\tخوب\n"))

    def test_malformed_utf8_reports_line(self, tmp_path):
        content = TSV.encode("utf-8") + b"d\t\xff\xfe\t1\n"
        with pytest.raises(MalformedUtf8) as info:
            load_dataset(write(tmp_path, "bad.tsv", content))
        assert info.value.row == 5

    def test_duplicate_ids(self, tmp_path):
        with pytest.raises(DuplicateDocId):
            load_dataset(write(tmp_path, "d.tsv", "id\ttext\tlabel\na\tx\t1\na\ty\t0\n"))

    def test_empty(self, tmp_path):
        with pytest.raises(EmptyCorpus):
            load_dataset(write(tmp_path, "d.tsv", "id\ttext\tlabel\n"))
        with pytest.raises(EmptyCorpus):
            load_dataset(write(tmp_path, "e.tsv", ""))

    def test_write_round_trip(self, tmp_path):
        ds = generate_synthetic_corpus(40, seed=2)
        back = load_dataset(write_dataset(ds, tmp_path / "s.tsv"))
        assert back == ds


class TestSplit:
    def test_reported_counts(self):
        n = 16278
        ds = Dataset([str(i) for i in range(n)], [""] * n, np.arange(n) % 2)
        split = split_train_test(ds, 0.2, seed=0)
        train, test = split.split
        assert len(test) == 3256
        assert len(train) + len(test) == n
        assert np.intersect1d(train, test).size == 0

    def test_invalid_fraction(self):
        ds = generate_synthetic_corpus(20)
        with pytest.raises(InvalidFraction):
            split_train_test(ds, 0.0)
        with pytest.raises(InvalidFraction):
            split_train_test(ds, 1.0)

    def test_single_class(self):
        ds = Dataset(["a", "b", "c"], ["x", "y", "z"], np.ones(3, int))
        with pytest.raises(DegenerateLabels):
            split_train_test(ds, 0.34)

    def test_deterministic(self):
        ds = generate_synthetic_corpus(100, seed=1)
        a = split_train_test(ds, seed=4).split
        b = split_train_test(ds, seed=4).split
        assert_array_equal(a[0], b[0])
        assert_array_equal(a[1], b[1])

    @pytest.mark.parametrize("n,seed", [(97, 0), (100, 1), (333, 2)])
    def test_class_ratio_within_one(self, n, seed):
        labels = (np.random.default_rng(seed).random(n) < 0.3).astype(int)
        labels[:2] = [0, 1]
        ds = Dataset([str(i) for i in range(n)], [""] * n, labels)
        _, test = split_train_test(ds, 0.2, seed=seed).split
        expected = 0.2 * labels.sum()
        assert abs(labels[test].sum() - expected) <= 1

    def test_train_and_test_views(self):
        ds = split_train_test(generate_synthetic_corpus(50), 0.2)
        assert len(ds.train()) == 40 and len(ds.test()) == 10


class TestSynthetic:
    def test_balance(self):
        ds = generate_synthetic_corpus(20)
        assert ds.labels.sum() == 10

    def test_deterministic(self):
        assert generate_synthetic_corpus(60, seed=3) == generate_synthetic_corpus(60, seed=3)
        assert generate_synthetic_corpus(60, seed=3) != generate_synthetic_corpus(60, seed=4)

    def test_too_small(self):
        with pytest.raises(InsufficientData):
            generate_synthetic_corpus(19)

    def test_noise_flips_exact_count(self):
        clean = generate_synthetic_corpus(200, seed=5)
        noisy = generate_synthetic_corpus(200, seed=5, noise=0.1)
        assert clean.texts == noisy.texts
        assert int((clean.labels != noisy.labels).sum()) == 20

    def test_lexicons(self):
        assert len(POSITIVE) >= 30 and len(NEGATIVE) >= 30
        stop = default_stopwords()
        for word in POSITIVE + NEGATIVE + FILLERS:
            assert normalize(word).text == word
            assert word not in stop
        assert not {stem(w) for w in POSITIVE} & {stem(w) for w in NEGATIVE}
        assert not ({stem(w) for w in POSITIVE + NEGATIVE} & {stem(w) for w in FILLERS})

    def test_separable_in_unigram_space(self):
        ds = generate_synthetic_corpus(200, seed=0)
        streams = [preprocess(t) for t in ds.texts]
        X = count_matrix(streams, build_vocabulary(streams)).dense()
        s = 2.0 * ds.labels - 1.0
        A = -(s[:, None] * np.column_stack([X, np.ones(len(X))]))
        res = linprog(np.zeros(A.shape[1]), A_ub=A, b_ub=-np.ones(len(X)), bounds=(None, None))
        assert res.status == 0
