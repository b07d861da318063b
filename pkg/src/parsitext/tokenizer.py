"""Tokenization, stopword filtering and light suffix stemming for normalized Persian."""

from __future__ import annotations

import functools
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from .errors import TableError
from .text_norm import ZWNJ, NormalizationTable, NormalizedText, _data_path, normalize

__all__ = [
    "TokenStream",
    "StemmerRules",
    "default_stemmer_rules",
    "default_stopwords",
    "load_stemmer_rules",
    "load_stopwords",
    "remove_stopwords",
    "stem",
    "stem_stream",
    "tokenize",
]

MIN_STEM = 2
MAX_STEM_PASSES = 2

# Persian comma, semicolon and question mark are Po already; listed for clarity.
_EXTRA_PUNCT = frozenset("،؛؟«»")


def _is_punct(ch: str) -> bool:
    return ch in _EXTRA_PUNCT or unicodedata.category(ch).startswith("P")


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple
    doc_id: object = None

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def tokenize(text: Union[NormalizedText, str], doc_id=None) -> TokenStream:
    """Split already-normalized text into tokens.

    Whitespace separates tokens; ZWNJ does not, so ``بخش\u200cها`` stays one token.
    Punctuation characters act as separators too, which strips them from token
    edges and keeps them out of tokens entirely.
    """
    text = str(text)
    cleaned = "".join(" " if _is_punct(ch) else ch for ch in text)
    tokens = []
    for raw in cleaned.split():
        tok = raw.strip(ZWNJ)
        if tok:
            tokens.append(tok)
    return TokenStream(tuple(tokens), doc_id)


def remove_stopwords(stream: TokenStream, stopwords: Iterable[str]) -> TokenStream:
    stopwords = stopwords if isinstance(stopwords, (set, frozenset)) else frozenset(stopwords)
    return TokenStream(tuple(t for t in stream.tokens if t not in stopwords), stream.doc_id)


@dataclass(frozen=True)
class StemmerRules:
    """(suffix, minimum remaining stem length) pairs, longest suffix first."""

    suffixes: tuple

    def __post_init__(self):
        ordered = tuple(sorted(self.suffixes, key=lambda r: len(r[0]), reverse=True))
        object.__setattr__(self, "suffixes", ordered)
        for suffix, min_len in ordered:
            if not suffix:
                raise TableError("empty suffix in stemmer rules")
            if min_len < MIN_STEM:
                raise TableError(f"suffix {suffix!r}: min length {min_len} is below {MIN_STEM}")


def load_stemmer_rules(path: Optional[Union[str, Path]] = None) -> StemmerRules:
    src = Path(path) if path else _data_path("stem_rules.tsv")
    rules = []
    for lineno, line in enumerate(src.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        suffix, _, min_len = line.rstrip("\r").partition("\t")
        try:
            rules.append((suffix, int(min_len)))
        except ValueError:
            raise TableError(f"{src}:{lineno}: expected SUFFIX<TAB>MINLEN") from None
    return StemmerRules(tuple(rules))


@functools.lru_cache(maxsize=None)
def default_stemmer_rules() -> StemmerRules:
    return load_stemmer_rules()


def load_stopwords(
    path: Optional[Union[str, Path]] = None, table: Optional[NormalizationTable] = None
) -> frozenset:
    """Read a stopword file; entries are normalized so they match normalized tokens."""
    src = Path(path) if path else _data_path("stopwords.txt")
    words = set()
    for line in src.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        words.add(normalize(line.strip(), table).text)
    words.discard("")
    return frozenset(words)


@functools.lru_cache(maxsize=None)
def default_stopwords() -> frozenset:
    return load_stopwords()


def stem(token: str, rules: Optional[StemmerRules] = None) -> str:
    """Strip at most one suffix per pass, for at most two passes."""
    rules = rules or default_stemmer_rules()
    for _ in range(MAX_STEM_PASSES):
        for suffix, min_len in rules.suffixes:
            if token.endswith(suffix):
                candidate = token[: -len(suffix)].rstrip(ZWNJ)
                if len(candidate) >= max(min_len, MIN_STEM):
                    token = candidate
                    break
        else:
            break
    return token


def stem_stream(stream: TokenStream, rules: Optional[StemmerRules] = None) -> TokenStream:
    return TokenStream(tuple(stem(t, rules) for t in stream.tokens), stream.doc_id)


def preprocess(
    raw: str,
    *,
    table: Optional[NormalizationTable] = None,
    stopwords: Optional[Sequence[str]] = None,
    rules: Optional[StemmerRules] = None,
    do_stem: bool = True,
    doc_id=None,
) -> TokenStream:
    """normalize -> tokenize -> drop stopwords -> stem, the usual cleaning chain."""
    stream = tokenize(normalize(raw, table), doc_id)
    stream = remove_stopwords(stream, default_stopwords() if stopwords is None else stopwords)
    if do_stem:
        stream = stem_stream(stream, rules)
    return stream
