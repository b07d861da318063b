"""Deterministic synthetic Persian sentiment corpus.

Documents mix words from one polarity lexicon with shared neutral fillers.
Surface noise (Arabic letter variants, TATWEEL, short vowels, spaced or fused
plural suffixes) is injected so that the normalizer has real work to do; it
never changes what a document means after normalization.
"""

from __future__ import annotations

import numpy as np

from .dataset import Dataset
from .errors import InsufficientData

__all__ = ["FILLERS", "NEGATIVE", "POSITIVE", "generate_synthetic_corpus"]

Z = "\u200c"  # zero-width non-joiner

POSITIVE = (
    "عالی", "خوب", "زیبا", "شاد", "دلنشین", "جذاب", "قشنگ", "درخشان", "شاهکار", "گیرا",
    "خلاق", "هنرمندانه", "زیرکانه", "دلپذیر", "امیدبخش", "صمیمی", "باشکوه", "تماشایی",
    "ستودنی", "بانمک", "هوشمندانه", "دلگرم", "پرانرژی", "موفق", "تاثیرگذار", "جالب",
    "بی" + Z + "نظیر", "لذت" + Z + "بخش", "شگفت" + Z + "انگیز", "خیره" + Z + "کننده",
    "دوست" + Z + "داشتنی", "فوق" + Z + "العاده", "ماندگار", "محشر",
)

NEGATIVE = (
    "بد", "ضعیف", "افتضاح", "کسل", "زشت", "تکراری", "مزخرف", "آشفته", "سطحی", "مبتذل",
    "ناخوشایند", "ناقص", "سردرگم", "شلوغ", "بیهوده", "پوچ", "فاجعه", "نازیبا", "خام",
    "آزاردهنده", "کسالت" + Z + "بار", "بی" + Z + "مزه", "بی" + Z + "روح", "بی" + Z + "معنی",
    "بی" + Z + "ارزش", "بی" + Z + "منطق", "خسته" + Z + "کننده", "ناامید" + Z + "کننده",
    "اعصاب" + Z + "خردکن", "ملال" + Z + "آور", "نچسب", "بدساخت", "ناشیانه", "ضعف",
)

# neutral content words shared by both classes
FILLERS = (
    "فیلم", "داستان", "بازیگر", "کارگردان", "صحنه", "پایان", "موسیقی", "تصویر",
    "شخصیت", "روایت", "سینما", "دیالوگ", "فیلمنامه", "قسمت", "سریال", "نقش",
    "تماشاگر", "اثر", "ساعت", "شب", "دیروز", "امروز", "خانواده", "دوستم", "بلیط",
    "سالن", "تدوین", "دوربین", "نور", "لباس", "گریم", "جلوه", "تیتراژ", "نسخه",
    "فصل", "کتاب", "شهر", "خیابان", "ماشین", "خانه",
)

# nouns that sometimes appear with the plural suffix
_PLURALIZABLE = ("فیلم", "بازیگر", "صحنه", "شخصیت", "دیالوگ", "قسمت", "نقش", "تماشاگر", "جلوه", "فصل", "کتاب")

_VERBS = ("بود", "است", "شد", "دیدم", "هست", "به نظرم")
_CONNECTORS = ("و", "اما", "ولی", "هم", "واقعا", "کاملا", "خیلی", "نسبتا")

_ARABIC_VARIANTS = {"ی": "ي", "ک": "ك"}
_HARAKAT = ("\u064e", "\u064f", "\u0650", "\u0651")  # fatha, damma, kasra, shadda


def _surface(word: str, rng: np.random.Generator) -> str:
    """Rewrite a canonical word into one of its non-canonical spellings."""
    roll = rng.random()
    if roll < 0.15:
        return "".join(_ARABIC_VARIANTS.get(ch, ch) for ch in word)
    if roll < 0.22 and len(word) > 2:
        pos = int(rng.integers(1, len(word)))
        if word[pos - 1] != Z and word[pos] != Z:
            return word[:pos] + "\u0640" + word[pos:]
    if roll < 0.27:
        pos = int(rng.integers(1, len(word) + 1))
        return word[:pos] + _HARAKAT[int(rng.integers(len(_HARAKAT)))] + word[pos:]
    return word


def _plural(noun: str, rng: np.random.Generator) -> str:
    joiner = (Z, " ", "")[int(rng.integers(3))]
    return noun + joiner + "ها"


def _document(lexicon, rng: np.random.Generator) -> str:
    words = []
    n_sentiment = int(rng.integers(2, 5))
    n_filler = int(rng.integers(4, 9))
    for w in rng.choice(len(lexicon), size=n_sentiment, replace=True):
        words.append(("s", lexicon[w]))
    for w in rng.choice(len(FILLERS), size=n_filler, replace=True):
        words.append(("f", FILLERS[w]))
    for _ in range(int(rng.integers(1, 4))):
        words.append(("c", _CONNECTORS[int(rng.integers(len(_CONNECTORS)))]))
    order = rng.permutation(len(words))
    out = []
    for i in order:
        kind, word = words[i]
        if kind == "f" and word in _PLURALIZABLE and rng.random() < 0.3:
            word = _plural(word, rng)
        elif kind == "s" and rng.random() < 0.1:
            word = word + " تر"
        out.append(_surface(word, rng))
    out.append(_VERBS[int(rng.integers(len(_VERBS)))])
    punct = ("", ".", "!", "،")[int(rng.integers(4))]
    return " ".join(out) + punct


def generate_synthetic_corpus(n_docs: int = 2000, seed: int = 0, noise: float = 0.0) -> Dataset:
    """Balanced two-class corpus (``n_docs // 2`` negatives, the rest positive).

    ``noise`` flips the labels of ``round(noise * n_docs)`` randomly chosen
    documents after generation; text is untouched.
    """
    if n_docs < 20:
        raise InsufficientData("the synthetic corpus needs at least 20 documents")
    if not 0.0 <= noise < 1.0:
        raise ValueError("noise must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    labels = np.zeros(n_docs, dtype=np.int64)
    labels[n_docs // 2:] = 1
    labels = labels[rng.permutation(n_docs)]
    texts = [_document(POSITIVE if y else NEGATIVE, rng) for y in labels]
    observed = labels.copy()
    n_flip = int(round(noise * n_docs))
    if n_flip:
        flip = rng.choice(n_docs, size=n_flip, replace=False)
        observed[flip] = 1 - observed[flip]
    ids = [f"syn{i:06d}" for i in range(n_docs)]
    provenance = {"source": "synthetic", "seed": seed, "noise": noise, "n_docs": n_docs}
    return Dataset(ids, texts, observed, provenance)
