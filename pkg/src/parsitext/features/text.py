"""n-gram extraction, vocabulary building and TF-IDF weighting."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from ..errors import EmptyCorpus, ShapeMismatch

__all__ = [
    "FeatureMatrix",
    "Vocabulary",
    "build_vocabulary",
    "count_matrix",
    "dump_matrix",
    "extract_ngrams",
    "load_matrix",
    "tfidf_fit_transform",
    "tfidf_transform",
    "tfidf_weight",
]

NORM_STATES = ("raw-count", "tfidf", "reduced")


@dataclass
class FeatureMatrix:
    """Rows are documents, columns are features.

    ``values`` is a CSR matrix for count/TF-IDF data and a dense array once
    the data has been reduced or clustered.
    """

    values: Union[sp.csr_matrix, np.ndarray]
    feature_names: Optional[list] = None
    norm_state: str = "raw-count"

    def __post_init__(self):
        if self.norm_state not in NORM_STATES:
            raise ValueError(f"unknown norm_state {self.norm_state!r}")
        if self.feature_names is not None and len(self.feature_names) != self.values.shape[1]:
            raise ShapeMismatch("feature_names length does not match column count")

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.values)

    def dense(self) -> np.ndarray:
        return self.values.toarray() if self.is_sparse else np.asarray(self.values)

    def take_rows(self, idx) -> "FeatureMatrix":
        return FeatureMatrix(self.values[np.asarray(idx)], self.feature_names, self.norm_state)


def _tokens(doc) -> Sequence[str]:
    return doc.tokens if hasattr(doc, "tokens") else list(doc)


def extract_ngrams(stream, unit: str = "word", n: int = 1) -> list:
    """Contiguous n-grams in document order.

    Word n-grams are joined with a single space; character n-grams are taken
    inside each token so no gram spans two tokens.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tokens = _tokens(stream)
    if unit == "word":
        return [" ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]
    if unit == "char":
        return [tok[i : i + n] for tok in tokens for i in range(len(tok) - n + 1)]
    raise ValueError(f"unit must be 'word' or 'char', got {unit!r}")


@dataclass
class Vocabulary:
    index: dict
    n: int
    unit: str
    doc_freq: np.ndarray
    n_docs: int
    min_df: int = 1

    def __len__(self):
        return len(self.index)

    @property
    def feature_names(self) -> list:
        return list(self.index)

    @property
    def idf(self) -> np.ndarray:
        return tfidf_weight(self.doc_freq, self.n_docs)

    def to_dict(self) -> dict:
        return {
            "features": list(self.index),
            "n": self.n,
            "unit": self.unit,
            "doc_freq": [int(v) for v in self.doc_freq],
            "n_docs": self.n_docs,
            "min_df": self.min_df,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Vocabulary":
        return cls(
            index={f: i for i, f in enumerate(doc["features"])},
            n=int(doc["n"]),
            unit=doc["unit"],
            doc_freq=np.asarray(doc["doc_freq"], dtype=np.int64),
            n_docs=int(doc["n_docs"]),
            min_df=int(doc.get("min_df", 1)),
        )


def tfidf_weight(doc_freq, n_docs: int) -> np.ndarray:
    """Smoothed idf: ln((1 + N) / (1 + df)) + 1."""
    doc_freq = np.asarray(doc_freq, dtype=np.float64)
    return np.log((1.0 + n_docs) / (1.0 + doc_freq)) + 1.0


def build_vocabulary(corpus: Iterable, unit: str = "word", n: int = 1, min_df: int = 1) -> Vocabulary:
    """Index every n-gram of the (training) corpus in first-seen order."""
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("cannot build a vocabulary from an empty corpus")
    df = {}
    for doc in corpus:
        for gram in dict.fromkeys(extract_ngrams(doc, unit, n)):
            df[gram] = df.get(gram, 0) + 1
    kept = [g for g, c in df.items() if c >= min_df]
    return Vocabulary(
        index={g: i for i, g in enumerate(kept)},
        n=n,
        unit=unit,
        doc_freq=np.array([df[g] for g in kept], dtype=np.int64),
        n_docs=len(corpus),
        min_df=min_df,
    )


def count_matrix(corpus: Iterable, vocab: Vocabulary) -> FeatureMatrix:
    """Raw term counts; grams outside the vocabulary are ignored."""
    indptr, indices, data = [0], [], []
    for doc in corpus:
        counts = {}
        for gram in extract_ngrams(doc, vocab.unit, vocab.n):
            col = vocab.index.get(gram)
            if col is not None:
                counts[col] = counts.get(col, 0) + 1
        cols = sorted(counts)
        indices.extend(cols)
        data.extend(counts[c] for c in cols)
        indptr.append(len(indices))
    values = sp.csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
        shape=(len(indptr) - 1, len(vocab)),
    )
    return FeatureMatrix(values, vocab.feature_names, "raw-count")


def _l2_normalize_rows(m: sp.csr_matrix) -> sp.csr_matrix:
    norms = np.sqrt(np.asarray(m.multiply(m).sum(axis=1)).ravel())
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return sp.csr_matrix(sp.diags(scale) @ m)


def _weight(counts: FeatureMatrix, vocab: Vocabulary) -> FeatureMatrix:
    weighted = sp.csr_matrix(counts.values @ sp.diags(vocab.idf))
    return FeatureMatrix(_l2_normalize_rows(weighted), vocab.feature_names, "tfidf")


def tfidf_fit_transform(corpus: Iterable, vocab: Vocabulary) -> FeatureMatrix:
    """TF-IDF matrix of the corpus ``vocab`` was built from (raw tf, L2 rows)."""
    corpus = list(corpus)
    if len(corpus) != vocab.n_docs:
        raise ShapeMismatch(
            f"vocabulary was built from {vocab.n_docs} documents, got {len(corpus)}"
        )
    return _weight(count_matrix(corpus, vocab), vocab)


def tfidf_transform(docs, vocab: Vocabulary) -> FeatureMatrix:
    """Weight unseen documents with frozen idf values.

    Accepts one token stream or a list of them; unseen grams are dropped.
    """
    single = hasattr(docs, "tokens") or (len(docs) > 0 and isinstance(docs[0], str))
    batch = [docs] if single else list(docs)
    return _weight(count_matrix(batch, vocab), vocab)


def dump_matrix(matrix: FeatureMatrix, path: Union[str, Path, None] = None) -> str:
    """Text dump: ``rows cols norm_state`` then one ``row col value`` line per non-zero."""
    coo = sp.coo_matrix(matrix.values)
    order = np.lexsort((coo.col, coo.row))
    lines = [f"{matrix.rows} {matrix.cols} {matrix.norm_state}"]
    lines += [f"{coo.row[i]} {coo.col[i]} {float(coo.data[i])!r}" for i in order]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def load_matrix(source: Union[str, Path]) -> FeatureMatrix:
    text = Path(source).read_text(encoding="utf-8") if isinstance(source, Path) or "\n" not in str(source) else source
    lines = text.splitlines()
    rows, cols, state = lines[0].split()
    r, c, v = [], [], []
    for line in lines[1:]:
        if line.strip():
            a, b, val = line.split()
            r.append(int(a))
            c.append(int(b))
            v.append(float(val))
    values = sp.csr_matrix((v, (r, c)), shape=(int(rows), int(cols)))
    return FeatureMatrix(values if state != "reduced" else values.toarray(), None, state)
