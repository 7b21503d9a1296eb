"""Record normalization into token sets, and token-set cosine similarity."""

from __future__ import annotations

import math
import re
import string
from dataclasses import dataclass
from functools import lru_cache

from nltk.stem.porter import PorterStemmer

SEPARATORS = "-_/=,"
_SEP_TABLE = str.maketrans({c: " " for c in SEPARATORS})
_RUN_RE = re.compile(r"[A-Za-z]+|[0-9]+")
_STRIP_CHARS = string.punctuation + string.whitespace
_stemmer = PorterStemmer()


@dataclass(frozen=True)
class PrepConfig:
    prefix_len: int = 2
    mask_min_len: int = 4
    lowercase: bool = True
    stem: bool = True

    def __post_init__(self) -> None:
        if self.prefix_len < 1 or self.mask_min_len < 1:
            raise ValueError("prefix_len and mask_min_len must be positive")
        if self.prefix_len >= self.mask_min_len:
            raise ValueError("prefix_len must be smaller than mask_min_len")


@dataclass(frozen=True)
class TokenSet:
    tokens: frozenset[str]
    source_record: str
    key: str = ""  # normalized record, used for sorting

    def __len__(self) -> int:
        return len(self.tokens)


@lru_cache(maxsize=1 << 16)
def stem(word: str) -> str:
    """Porter stem applied until it stops changing, so stem(stem(w)) == stem(w)."""
    prev, cur = None, word
    while cur != prev:
        prev, cur = cur, _stemmer.stem(cur)
    return cur


def mask_digits(token: str, prefix_len: int) -> str:
    return token[:prefix_len] + "x" * (len(token) - prefix_len)


def normalize(record: str, cfg: PrepConfig = PrepConfig()) -> list[str]:
    """The record's words after case folding, edge stripping and separator split."""
    text = record.lower() if cfg.lowercase else record
    text = text.strip(_STRIP_CHARS).translate(_SEP_TABLE)
    return text.split()


def preprocess_record(record: str, cfg: PrepConfig = PrepConfig()) -> TokenSet:
    words = normalize(record, cfg)
    tokens: set[str] = set()
    if len(words) >= 2:
        tokens.add(" ".join(words))
    for word in words:
        if word.isalpha() and cfg.stem:
            tokens.add(stem(word))
        else:
            tokens.add(word)
        for run in _RUN_RE.findall(word):
            if run.isdigit():
                tokens.add(run)
                if len(run) >= cfg.mask_min_len:
                    tokens.add(mask_digits(run, cfg.prefix_len))
            else:
                tokens.add(stem(run) if cfg.stem else run)
    tokens.discard("")
    return TokenSet(frozenset(tokens), record, " ".join(words))


def record_cosine(x: TokenSet | frozenset[str], y: TokenSet | frozenset[str]) -> float:
    """Cosine of binary token vectors: |x & y| / sqrt(|x| |y|)."""
    tx = x.tokens if isinstance(x, TokenSet) else x
    ty = y.tokens if isinstance(y, TokenSet) else y
    if not tx or not ty:
        return 0.0
    return len(tx & ty) / math.sqrt(len(tx) * len(ty))
