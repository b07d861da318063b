"""Persian text normalization.

Raw user-generated Persian mixes Arabic and Persian code points, sprinkles
diacritics and TATWEEL, and writes affixed words three different ways
(plain space, ZWNJ, fused).  :func:`normalize` collapses all of that onto one
canonical string so that one word always yields one feature.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

from .errors import TableError

__all__ = [
    "ZWNJ",
    "TATWEEL",
    "NormalizationTable",
    "NormalizedText",
    "TransliterationTable",
    "default_table",
    "default_transliteration",
    "load_table",
    "load_transliteration",
    "normalize",
    "transliterate_fenglish",
]

ZWNJ = "\u200c"
TATWEEL = "\u0640"
HARAKAT = frozenset(chr(cp) for cp in range(0x064B, 0x0653))

# A fused affix is only split off when at least this many letters remain.
MIN_FUSED_STEM = 2

_LETTER = r"[^\W\d_]"
_LETTER_RUN = re.compile(r"[^\W\d_]+")
_WHITESPACE = re.compile(r"\s+")
_ZWNJ_RUN = re.compile(r"[\s\u200c]*\u200c[\s\u200c]*")

PathLike = Union[str, Path]


def _data_path(name: str):
    return resources.files("parsitext").joinpath("data").joinpath(name)


@dataclass(frozen=True)
class NormalizationTable:
    """Immutable rule set driving :func:`normalize`.

    ``char_map`` maps a single source character to its canonical replacement;
    an empty string deletes it.  ``affixes`` are joined with ZWNJ both from the
    plain-space and the fused spelling, ``space_only_affixes`` only from the
    plain-space spelling.  ``protected`` words end in an affix by accident and
    are never split.
    """

    char_map: Mapping[str, str]
    affixes: tuple = ()
    space_only_affixes: tuple = ()
    protected: frozenset = frozenset()
    stripped: frozenset = field(default=HARAKAT | {TATWEEL})

    def __post_init__(self):
        keys = set(self.char_map)
        for src, dst in self.char_map.items():
            if len(src) != 1:
                raise TableError(f"char_map key {src!r} is not a single character")
            if len(dst) > 1:
                raise TableError(f"char_map value for U+{ord(src):04X} is not a single character")
            if dst in keys:
                raise TableError(
                    f"U+{ord(src):04X} maps to U+{ord(dst):04X}, which is itself a key"
                )
            if dst and dst in self.stripped:
                raise TableError(f"U+{ord(src):04X} maps to a stripped character")
        for affix in self.affixes + self.space_only_affixes:
            if not affix or not _LETTER_RUN.fullmatch(affix):
                raise TableError(f"affix {affix!r} must be a non-empty run of letters")
        # Affix pieces produced by a fused split must not split again.
        fused = sorted(self.affixes, key=len, reverse=True)
        for affix in fused:
            for other in fused:
                if other != affix and affix.endswith(other) and (
                    len(affix) - len(other) >= MIN_FUSED_STEM
                ) and affix not in self.protected:
                    raise TableError(f"affix {affix!r} would itself split into {other!r}")

    @functools.cached_property
    def _char_translation(self):
        return {ord(s): (d or None) for s, d in self.char_map.items()}

    @functools.cached_property
    def _harakat_translation(self):
        return {ord(c): None for c in self.stripped if c != TATWEEL}

    @functools.cached_property
    def _fused_affixes(self):
        return tuple(sorted(self.affixes, key=len, reverse=True))

    @functools.cached_property
    def _space_join(self):
        every = sorted(set(self.affixes) | set(self.space_only_affixes), key=len, reverse=True)
        if not every:
            return None
        alternation = "|".join(re.escape(a) for a in every)
        return re.compile(rf"(?<={_LETTER})\s+({alternation})(?!{_LETTER}|\u200c)")


@dataclass(frozen=True)
class NormalizedText:
    """Canonical text plus the identifiers of the rules that changed it."""

    text: str
    applied_rules: tuple = ()

    def __str__(self):
        return self.text


def _parse_hex(field_: str, path, lineno: int) -> str:
    try:
        return chr(int(field_, 16))
    except ValueError:
        raise TableError(f"{path}:{lineno}: bad hex code point {field_!r}") from None


def load_table(table: Optional[PathLike] = None, affixes: Optional[PathLike] = None) -> NormalizationTable:
    """Read a normalization table and affix list (package defaults when omitted)."""
    table_src = Path(table) if table else _data_path("norm_table.tsv")
    affix_src = Path(affixes) if affixes else _data_path("affixes.txt")

    char_map = {}
    for lineno, line in enumerate(table_src.read_text(encoding="utf-8").splitlines(), 1):
        line = line.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        src, _, dst = line.partition("\t")
        src_ch = _parse_hex(src.strip(), table_src, lineno)
        dst = dst.strip()
        char_map[src_ch] = _parse_hex(dst, table_src, lineno) if dst else ""

    both, space_only, protected = [], [], set()
    for line in affix_src.read_text(encoding="utf-8").splitlines():
        line = line.strip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.startswith("!"):
            protected.add(line[1:].strip())
            continue
        affix, _, flag = line.partition("\t")
        (space_only if flag.strip() == "space" else both).append(affix.strip())

    return NormalizationTable(
        char_map=char_map,
        affixes=tuple(both),
        space_only_affixes=tuple(space_only),
        protected=frozenset(protected),
    )


@functools.lru_cache(maxsize=None)
def default_table() -> NormalizationTable:
    return load_table()


def _split_fused(segment: str, table: NormalizationTable) -> str:
    parts = []
    while segment not in table.protected:
        for affix in table._fused_affixes:
            if segment.endswith(affix) and len(segment) - len(affix) >= MIN_FUSED_STEM:
                parts.append(affix)
                segment = segment[: -len(affix)]
                break
        else:
            break
    if not parts:
        return segment
    return ZWNJ.join([segment] + parts[::-1])


def _collapse_zwnj_run(match: re.Match) -> str:
    run = match.group(0)
    return ZWNJ if run.strip(ZWNJ) == "" else " "


def normalize(raw: str, table: Optional[NormalizationTable] = None) -> NormalizedText:
    """Canonicalize one string.

    Steps run in a fixed order: character unification, diacritic and TATWEEL
    deletion, ZWNJ canonicalization around affixes, whitespace collapse.
    """
    table = table or default_table()
    applied = []

    def step(rule, before, after):
        if after != before:
            applied.append(rule)
        return after

    text = step("char_map", raw, raw.translate(table._char_translation))
    text = step("strip_diacritics", text, text.translate(table._harakat_translation))
    if TATWEEL in table.stripped:
        text = step("strip_tatweel", text, text.replace(TATWEEL, ""))

    cleaned = _ZWNJ_RUN.sub(_collapse_zwnj_run, text).strip(ZWNJ)
    text = step("zwnj_cleanup", text, cleaned)
    if table._space_join is not None:
        text = step("zwnj_join", text, table._space_join.sub(ZWNJ + r"\1", text))
    if table.affixes:
        text = step("zwnj_split", text, _LETTER_RUN.sub(lambda m: _split_fused(m.group(0), table), text))

    text = step("whitespace", text, _WHITESPACE.sub(" ", text).strip(" "))
    return NormalizedText(text, tuple(applied))


# --- FEnglish --------------------------------------------------------------

_VOWELS = frozenset("aeiou")


@dataclass(frozen=True)
class TransliterationTable:
    """Latin-to-Persian rules; see ``data/fenglish.tsv`` for the kinds."""

    words: Mapping[str, str]
    digraphs: Mapping[str, str]
    initial: Mapping[str, str]
    final: Mapping[str, str]
    open: Mapping[str, str]
    single: Mapping[str, str]

    @functools.cached_property
    def _digraph_keys(self):
        return tuple(sorted(self.digraphs, key=len, reverse=True))

    @functools.cached_property
    def _initial_keys(self):
        return tuple(sorted(self.initial, key=len, reverse=True))


_KINDS = ("word", "digraph", "initial", "final", "open", "single")


def load_transliteration(path: Optional[PathLike] = None) -> TransliterationTable:
    src = Path(path) if path else _data_path("fenglish.tsv")
    maps = {k: {} for k in _KINDS}
    for lineno, line in enumerate(src.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cols = line.rstrip("\r").split("\t")
        if len(cols) == 2:
            cols.append("")
        if len(cols) != 3 or cols[0] not in maps:
            raise TableError(f"{src}:{lineno}: expected KIND<TAB>LATIN<TAB>PERSIAN")
        kind, latin, persian = cols
        maps[kind][latin.lower()] = persian
    return TransliterationTable(
        words=maps["word"],
        digraphs=maps["digraph"],
        initial=maps["initial"],
        final=maps["final"],
        open=maps["open"],
        single=maps["single"],
    )


@functools.lru_cache(maxsize=None)
def default_transliteration() -> TransliterationTable:
    return load_transliteration()


def _match_at(word: str, i: int, keys: Sequence[str]) -> Optional[str]:
    for key in keys:
        if word.startswith(key, i):
            return key
    return None


def _is_open_syllable(word: str, i: int, table: TransliterationTable) -> bool:
    # vowel at i, then exactly one consonant (possibly a digraph), then a vowel
    j = i + 1
    if j >= len(word) or word[j] in _VOWELS:
        return False
    dig = _match_at(word, j, table._digraph_keys)
    j += len(dig) if dig and not set(dig) & _VOWELS else 1
    return j < len(word) and word[j] in _VOWELS


def _transliterate_word(word: str, table: TransliterationTable) -> str:
    if word in table.words:
        return table.words[word]
    out = []
    i, n = 0, len(word)
    while i < n:
        if i == 0:
            key = _match_at(word, 0, table._initial_keys)
            if key:
                out.append(table.initial[key])
                i += len(key)
                continue
        key = _match_at(word, i, table._digraph_keys)
        if key:
            out.append(table.digraphs[key])
            i += len(key)
            continue
        ch = word[i]
        if i == n - 1 and ch in table.final:
            out.append(table.final[ch])
        elif ch in table.open and _is_open_syllable(word, i, table):
            out.append(table.open[ch])
        else:
            out.append(table.single.get(ch, ch))
        i += 1
    return "".join(out)


_LATIN_WORD = re.compile(r"[A-Za-z]+")


def transliterate_fenglish(
    latin: str,
    table: Optional[TransliterationTable] = None,
    norm_table: Optional[NormalizationTable] = None,
) -> str:
    """Greedy longest-match transliteration of Persian written in Latin letters.

    Unmapped characters pass through; the result is normalized.
    """
    table = table or default_transliteration()
    persian = _LATIN_WORD.sub(lambda m: _transliterate_word(m.group(0).lower(), table), latin)
    return normalize(persian, norm_table).text
