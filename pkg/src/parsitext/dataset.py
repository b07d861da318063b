"""Labelled document collections: CSV/TSV ingestion and stratified train/test splits."""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np

from .errors import (
    DegenerateLabels,
    DuplicateDocId,
    EmptyCorpus,
    InvalidFraction,
    MalformedUtf8,
    MissingColumn,
    UnmappableLabel,
)
from .evaluation import _interleaved_order

__all__ = ["DEFAULT_LABEL_MAP", "Dataset", "load_dataset", "split_train_test", "write_dataset"]

DEFAULT_LABEL_MAP = {"1": 1, "0": 0, "pos": 1, "neg": 0, "positive": 1, "negative": 0}


@dataclass
class Dataset:
    doc_ids: list
    texts: list
    labels: np.ndarray
    provenance: dict = field(default_factory=dict, compare=False)
    split: Optional[tuple] = None

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if not (len(self.doc_ids) == len(self.texts) == self.labels.shape[0]):
            raise ValueError("doc_ids, texts and labels must have equal length")
        if len(set(self.doc_ids)) != len(self.doc_ids):
            seen, dup = set(), None
            for d in self.doc_ids:
                if d in seen:
                    dup = d
                    break
                seen.add(d)
            raise DuplicateDocId(f"duplicate doc_id {dup!r}")
        if not np.all((self.labels == 0) | (self.labels == 1)):
            raise DegenerateLabels("labels must be binary 0/1")

    def __len__(self) -> int:
        return len(self.texts)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        same_split = (self.split is None) == (other.split is None) and (
            self.split is None or all(np.array_equal(a, b) for a, b in zip(self.split, other.split))
        )
        return (
            self.doc_ids == other.doc_ids
            and self.texts == other.texts
            and np.array_equal(self.labels, other.labels)
            and same_split
        )

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(
            [self.doc_ids[i] for i in idx],
            [self.texts[i] for i in idx],
            self.labels[idx],
            dict(self.provenance),
        )

    def train(self) -> "Dataset":
        return self.subset(self._split()[0])

    def test(self) -> "Dataset":
        return self.subset(self._split()[1])

    def _split(self):
        if self.split is None:
            raise ValueError("dataset has no train/test split; call split_train_test first")
        return self.split


def _sniff_delimiter(path: Path, fmt: Optional[str]) -> str:
    fmt = (fmt or path.suffix.lstrip(".")).lower()
    return "\t" if fmt == "tsv" else ","


def load_dataset(
    path: Union[str, Path],
    format: Optional[str] = None,
    text_col: str = "text",
    label_col: str = "label",
    label_map: Optional[Mapping[str, int]] = None,
    id_col: Optional[str] = "id",
) -> Dataset:
    """Read a UTF-8 CSV/TSV file with a header row.

    A leading byte-order mark and CRLF line endings are accepted.  Labels are
    looked up in ``label_map`` after stripping surrounding whitespace; rows
    without an ``id_col`` value are numbered from 1.  Row numbers in errors
    count physical lines, the header being line 1.
    """
    path = Path(path)
    raw = path.read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if raw.startswith(b"\xef\xbb\xbf"):
        raw = raw[3:]
    lines = []
    for lineno, chunk in enumerate(raw.split(b"\n"), start=1):
        try:
            lines.append(chunk.decode("utf-8"))
        except UnicodeDecodeError:
            raise MalformedUtf8(lineno) from None
    text = "\n".join(lines)
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=_sniff_delimiter(path, format))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise EmptyCorpus(f"{path} is empty") from None
    for col in (text_col, label_col):
        if col not in header:
            raise MissingColumn(col)
    t_i, l_i = header.index(text_col), header.index(label_col)
    id_i = header.index(id_col) if id_col and id_col in header else None
    mapping = {str(k): int(v) for k, v in (label_map or DEFAULT_LABEL_MAP).items()}

    ids, texts, labels = [], [], []
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        lineno = reader.line_num
        if len(row) <= max(t_i, l_i):
            raise MissingColumn(f"{label_col if len(row) <= l_i else text_col} (line {lineno})")
        label = row[l_i].strip()
        if label not in mapping:
            raise UnmappableLabel(lineno, label)
        ids.append(row[id_i].strip() if id_i is not None and row[id_i].strip() else str(len(ids) + 1))
        texts.append(row[t_i])
        labels.append(mapping[label])
    if not texts:
        raise EmptyCorpus(f"{path} has no data rows")
    return Dataset(ids, texts, np.asarray(labels, dtype=np.int64), {"source": str(path), "sha256": digest})


def write_dataset(ds: Dataset, path: Union[str, Path], format: Optional[str] = None) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=_sniff_delimiter(path, format), lineterminator="\n")
        writer.writerow(["id", "text", "label"])
        for doc_id, text, label in zip(ds.doc_ids, ds.texts, ds.labels):
            writer.writerow([doc_id, text, int(label)])
    return path


def split_train_test(ds: Dataset, test_fraction: float = 0.2, stratified: bool = True, seed: int = 0) -> Dataset:
    """Attach sorted (train, test) index arrays; the test side has round(fraction * n) rows.

    The stratified split takes a prefix of a class-interleaved shuffle, so each
    class lands within one row of its proportional share on both sides.
    """
    n = len(ds)
    if not 0.0 < test_fraction < 1.0:
        raise InvalidFraction(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n_test = int(round(test_fraction * n))
    if n_test < 1 or n_test >= n:
        raise InvalidFraction(f"test_fraction {test_fraction} of {n} rows leaves an empty side")
    if ds.labels.min() == ds.labels.max():
        raise DegenerateLabels("cannot split a single-class dataset")
    rng = np.random.default_rng(seed)
    order = _interleaved_order(ds.labels, rng) if stratified else rng.permutation(n)
    test = np.sort(order[:n_test])
    train = np.setdiff1d(np.arange(n), test, assume_unique=True)
    return replace(ds, split=(train, test), provenance=dict(ds.provenance))
