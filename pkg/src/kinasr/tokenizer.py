"""Kinyarwanda text normalization and tokenization.

Two vocabulary modes are supported: ``character`` (every letter is its own
token) and ``syllable`` (consonant clusters are single tokens, matched
greedily longest-first).  Kinyarwanda has only open syllables, so counting
vowels counts syllables.
"""

from __future__ import annotations

import json
import re
import unicodedata
from dataclasses import dataclass, field

from .errors import InvalidIdError, UnknownSymbolError

BLANK_TOKEN = "<blank>"
SPACE_TOKEN = " "

VOWELS = ["i", "u", "o", "a", "e"]

CONSONANTS = [
    "b", "c", "d", "f", "g",
    "h", "j", "k", "m", "n",
    "p", "r", "l", "s", "t",
    "v", "y", "w", "z",
]

# The consonant-cluster inventory of the orthography, reading order.
CONSONANT_CLUSTERS = [
    "bw", "by", "cw", "cy", "dw",
    "fw", "gw", "hw", "kw", "jw",
    "jy", "ny", "mw", "my", "nw",
    "pw", "py", "rw", "ry", "sw",
    "sy", "tw", "ty", "vw", "vy",
    "zw", "pf", "ts", "sh", "shy",
    "mp", "mb", "mf", "mv", "nc",
    "nj", "nk", "ng", "nt", "nd",
    "ns", "nz", "nny", "nyw", "byw",
    "ryw", "shw", "tsw", "pfy", "mbw",
    "mby", "mfw", "mpw", "mpy", "mvw",
    "mvy", "myw", "ncw", "ncy", "nsh",
    "ndw", "ndy", "njw", "njy", "nkw",
    "ngw", "nsw", "nsy", "ntw", "nty",
    "nzw", "shyw", "mbyw", "mvyw", "nshy",
    "nshw", "nshyw", "njyw",
]

FOREIGN_CHARS = ["x", "q"]

PUNCTUATION = [".", ",", "?", "!", ":", "'"]

# Curly/typographic apostrophes that normalize() maps to the straight one.
_APOSTROPHE_VARIANTS = "‘’ʼ′`"

_ALPHABET = set("abcdefghijklmnopqrstuvwxyz") | {" "} | set(PUNCTUATION)

_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class Vocabulary:
    """Ordered token inventory; token order is the posteriorgram column contract."""

    mode: str
    tokens: tuple[str, ...]
    blank_id: int = 0

    _index: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.tokens)})

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def space_id(self) -> int:
        return self._index[SPACE_TOKEN]

    @property
    def punctuation_ids(self) -> frozenset[int]:
        return frozenset(self._index[p] for p in PUNCTUATION if p in self._index)

    @property
    def max_token_len(self) -> int:
        return max(len(t) for i, t in enumerate(self.tokens) if i != self.blank_id)

    def id_of(self, token: str) -> int | None:
        return self._index.get(token)

    def to_json(self) -> str:
        return json.dumps(
            {"mode": self.mode, "tokens": list(self.tokens), "blank_id": self.blank_id},
            ensure_ascii=False,
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "Vocabulary":
        raw = json.loads(text)
        return cls(mode=raw["mode"], tokens=tuple(raw["tokens"]), blank_id=raw["blank_id"])

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(self.to_json())
            f.write("\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, encoding="utf-8") as f:
            return cls.from_json(f.read())


@dataclass(frozen=True)
class TokenSequence:
    """Sequence of non-blank vocabulary indices."""

    ids: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)


def build_vocab(mode: str) -> Vocabulary:
    """Build the fixed vocabulary for ``character`` or ``syllable`` mode.

    Order is deterministic: blank, space, vowels, consonants, clusters by
    descending length then lexicographic (syllable mode only), foreign
    characters, punctuation.
    """
    if mode not in ("character", "syllable"):
        raise ValueError(f"unknown vocabulary mode: {mode!r}")
    tokens = [BLANK_TOKEN, SPACE_TOKEN]
    tokens += VOWELS
    tokens += CONSONANTS
    if mode == "syllable":
        tokens += sorted(CONSONANT_CLUSTERS, key=lambda t: (-len(t), t))
    tokens += FOREIGN_CHARS
    tokens += PUNCTUATION
    return Vocabulary(mode=mode, tokens=tuple(tokens))


def normalize(text: str) -> str:
    """Lowercase, collapse whitespace, straighten apostrophes, drop anything
    outside the vocabulary alphabet.  Idempotent."""
    text = unicodedata.normalize("NFC", text).lower()
    for ch in _APOSTROPHE_VARIANTS:
        text = text.replace(ch, "'")
    text = _WS_RE.sub(" ", text)
    text = "".join(ch for ch in text if ch in _ALPHABET)
    text = _WS_RE.sub(" ", text)
    return text.strip()


def tokenize(text: str, vocab: Vocabulary) -> TokenSequence:
    """Map normalized text to token ids.

    Syllable mode scans left to right taking the longest token that matches
    at each position; character mode maps each character.  Raises
    :class:`UnknownSymbolError` (with the offset) where no token matches.
    """
    ids: list[int] = []
    if vocab.mode == "character":
        for offset, ch in enumerate(text):
            tid = vocab.id_of(ch)
            if tid is None or tid == vocab.blank_id:
                raise UnknownSymbolError(text, offset)
            ids.append(tid)
        return TokenSequence(tuple(ids))

    max_len = vocab.max_token_len
    pos = 0
    n = len(text)
    while pos < n:
        tid = None
        for length in range(min(max_len, n - pos), 0, -1):
            cand = vocab.id_of(text[pos:pos + length])
            if cand is not None and cand != vocab.blank_id:
                tid = cand
                pos += length
                break
        if tid is None:
            raise UnknownSymbolError(text, pos)
        ids.append(tid)
    return TokenSequence(tuple(ids))


def detokenize(tokens: TokenSequence, vocab: Vocabulary) -> str:
    """Concatenate token strings; inverse of :func:`tokenize` on normalized text."""
    parts = []
    for tid in tokens:
        if not 0 <= tid < len(vocab.tokens):
            raise InvalidIdError(f"token id {tid} out of range for vocabulary of {len(vocab.tokens)}")
        if tid == vocab.blank_id:
            raise InvalidIdError("blank id is not a text token")
        parts.append(vocab.tokens[tid])
    return "".join(parts)


def syllable_count(text: str) -> int:
    """Number of syllables in normalized text = number of vowel characters
    (all syllables are open)."""
    return sum(1 for ch in text if ch in "aeiou")
