"""Seeded synthetic databases with known matched and non-matched field pairs.

Every ground-truth pair lives in its own two tables, so a generated database
holds ``2 * (n_matched + n_nonmatched)`` single-purpose tables.

Numerical pairs: side ``a`` is a primary key of clustered integer ids. A
matched side ``b`` reuses a fraction of those ids and draws the rest from the
same clusters. A non-matched side ``b`` is built the same way over a range
shifted by ``range_drift`` spans and reuses ``nonmatched_overlap`` of the ids.

Non-numerical pairs: records are product-style codes built from families (an
alphabetic stem plus a two-digit prefix). Matched sides draw from one shared
model pool; non-matched sides use disjoint families or a different kind of
text altogether (sites, people, work groups, free text).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .base import FieldId, FieldKind, FieldPair
from .evalkit import GroundTruthEntry
from .ingest import FieldColumn, TableData


class SynthKind(str, enum.Enum):
    NUMERIC = "numeric"
    TEXT = "text"


@dataclass(frozen=True)
class SynthSpec:
    kind: SynthKind = SynthKind.NUMERIC
    n_matched: int = 30
    n_nonmatched: int = 30
    records_per_field: int = 10_000
    overlap: float = 0.3
    overlap_spread: float = 0.8  # matched pair i reuses overlap * (1 - spread * u_i)
    nonmatched_overlap: float = 0.0
    range_drift: float = 0.8
    noise: float = 0.02
    hard_negative_rate: float = 0.3  # text only: non-matched pairs of two product-code fields
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", SynthKind(self.kind))
        for name in ("overlap", "overlap_spread", "nonmatched_overlap", "noise", "hard_negative_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} must lie in [0, 1]")
        if self.overlap <= self.nonmatched_overlap:
            raise ValueError("overlap must exceed nonmatched_overlap")
        if self.range_drift < 0:
            raise ValueError("range_drift must be non-negative")
        if self.n_matched < 0 or self.n_nonmatched < 0 or self.n_matched + self.n_nonmatched == 0:
            raise ValueError("need at least one pair")
        if self.records_per_field < 10:
            raise ValueError("records_per_field must be at least 10")

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["kind"] = self.kind.value
        return d


GARBAGE = ("n/a", "unknown", "#REF!", "tbd", "?")


def _rng(spec: SynthSpec, *path: int) -> np.random.Generator:
    return np.random.default_rng([spec.seed, 0 if spec.kind == SynthKind.NUMERIC else 1, *path])


def _inject_noise(cells: list[str], rate: float, rng: np.random.Generator, numeric: bool) -> list[str]:
    out: list = list(cells)
    for i in np.flatnonzero(rng.random(len(out)) < rate):
        roll = rng.random()
        if roll < 0.5:
            out[i] = None
        elif roll < 0.8 and numeric:
            out[i] = str(-int(rng.integers(1, 10**6)))
        else:
            out[i] = str(GARBAGE[int(rng.integers(len(GARBAGE)))])
    return out


# -- numerical ------------------------------------------------------------------


def _clusters(rng: np.random.Generator, lo: int, span: int) -> tuple[np.ndarray, int]:
    k = int(rng.integers(6, 16))
    width = max(span // 150, 1)
    starts = lo + rng.integers(0, max(span - width, 1), size=k)
    return np.sort(starts), width


def _draw_from_clusters(
    rng: np.random.Generator, starts: np.ndarray, width: int, n: int, exclude: np.ndarray
) -> np.ndarray:
    out = np.empty(0, dtype=np.int64)
    while out.size < n:
        c = rng.integers(0, starts.size, size=2 * n)
        vals = starts[c] + rng.integers(0, width, size=2 * n)
        out = np.setdiff1d(np.union1d(out, vals), exclude)
    return rng.choice(out, size=n, replace=False)


def _numeric_pair(spec: SynthSpec, i: int, matched: bool) -> tuple[list[str], list[str]]:
    rng = _rng(spec, i)
    n = spec.records_per_field
    lo = int(10 ** rng.uniform(3, 8))
    span = int(10 ** rng.uniform(6, 7.5))
    starts, width = _clusters(rng, lo, span)
    a = _draw_from_clusters(rng, starts, width, n, np.empty(0, dtype=np.int64))
    if matched:
        share = spec.overlap * (1.0 - spec.overlap_spread * rng.random())
        b_starts = starts
    else:
        share = spec.nonmatched_overlap
        b_starts, _ = _clusters(rng, lo + int(spec.range_drift * span), span)
    reused = rng.choice(a, size=int(round(share * n)), replace=False)
    fresh = _draw_from_clusters(rng, b_starts, width, n - reused.size, a)
    b = np.concatenate([reused, fresh])
    rng.shuffle(b)
    a_cells = [str(v) for v in a]
    b_cells = _inject_noise([str(v) for v in b], spec.noise, rng, numeric=True)
    return a_cells, b_cells


# -- non-numerical ------------------------------------------------------------------

_CONSONANTS = "bcdfghjklmnpqrstvwxz"
_VOWELS = "aeiou"
_COMMON_SUFFIX = "k9"
_PORTS = ("8", "12", "16", "24", "32", "48", "96", "1g", "10g")
_SITE_KINDS = ("bldg", "fl", "rm", "dc", "lab")
_GROUP_WORDS = (
    "routing", "switching", "wireless", "security", "voice", "storage", "optical",
    "emea", "apac", "amer", "escalation", "triage", "backbone", "campus", "edge",
)
_TEXT_WORDS = (
    "power", "supply", "failure", "reboot", "crash", "memory", "leak", "fan", "noise",
    "link", "flap", "interface", "down", "upgrade", "image", "corrupt", "license",
    "expired", "port", "error", "counter", "high", "cpu", "spike", "config", "lost",
)


def _syllables(rng: np.random.Generator, k: int) -> str:
    return "".join(
        _CONSONANTS[int(rng.integers(len(_CONSONANTS)))] + _VOWELS[int(rng.integers(len(_VOWELS)))]
        for _ in range(k)
    )


def _families(rng: np.random.Generator, count: int, taken: set[str]) -> list[tuple[str, str, tuple[str, ...]]]:
    """(alpha stem, two-digit prefix, series letter, variant suffixes); stems unique within a pair."""
    out = []
    while len(out) < count:
        stem = _letters(rng, int(rng.integers(2, 4)))
        if stem in taken:
            continue
        taken.add(stem)
        ports = rng.choice(_PORTS, size=2, replace=False)
        suffixes = tuple(str(p) + _letters(rng, int(rng.integers(1, 3))) for p in ports)
        series = _letters(rng, 1) if rng.random() < 0.5 else ""
        out.append((stem, str(int(rng.integers(10, 100))), series, suffixes))
    return out


def _letters(rng: np.random.Generator, k: int) -> str:
    return "".join(_CONSONANTS[int(j)] for j in rng.integers(0, len(_CONSONANTS), size=k))


def _model_pool(rng: np.random.Generator, families: list, size: int) -> list[tuple[str, tuple[str, ...]]]:
    pool: dict[str, tuple[str, ...]] = {}
    while len(pool) < size:
        stem, prefix, series, suffixes = families[int(rng.integers(len(families)))]
        tail = f"{int(rng.integers(0, 100)):02d}"
        pool[f"{stem}{prefix}{tail}{series}"] = suffixes
    return sorted(pool.items())


def _product_records(rng: np.random.Generator, pool: list, n: int) -> list[str]:
    """Model codes, some with a family variant suffix; case and suffix rate vary per field."""
    upper = rng.random() < 0.5
    variant_rate = rng.uniform(0.0, 0.7)
    out = []
    for j in rng.integers(0, len(pool), size=n):
        model, suffixes = pool[int(j)]
        parts = [model]
        if rng.random() < variant_rate:
            parts.append(suffixes[int(rng.integers(len(suffixes)))])
        if rng.random() < 0.1:
            parts.append(_COMMON_SUFFIX)
        rec = "-".join(parts)
        out.append(rec.upper() if upper else rec)
    return out


def _site_records(rng: np.random.Generator, n: int) -> list[str]:
    cities = [_syllables(rng, 2).upper() for _ in range(12)]
    return [
        f"{cities[int(rng.integers(len(cities)))]}-{_SITE_KINDS[int(rng.integers(len(_SITE_KINDS)))]}"
        f"{int(rng.integers(1, 40))}"
        for _ in range(n)
    ]


def _people_records(rng: np.random.Generator, n: int) -> list[str]:
    first = [_syllables(rng, 2) for _ in range(60)]
    last = [_syllables(rng, 3) for _ in range(80)]
    return [
        f"{first[int(rng.integers(60))]}.{last[int(rng.integers(80))]}@corp.example"
        for _ in range(n)
    ]


def _group_records(rng: np.random.Generator, n: int) -> list[str]:
    words = list(_GROUP_WORDS)
    return [
        "_".join(rng.choice(words, size=int(rng.integers(2, 4)), replace=False)).upper()
        for _ in range(n)
    ]


def _free_text_records(rng: np.random.Generator, n: int) -> list[str]:
    words = list(_TEXT_WORDS)
    return [" ".join(rng.choice(words, size=int(rng.integers(3, 7)))) for _ in range(n)]


_OTHER_KINDS: tuple[Callable[[np.random.Generator, int], list[str]], ...] = (
    _site_records, _people_records, _group_records, _free_text_records,
)


def _text_pair(spec: SynthSpec, i: int, matched: bool) -> tuple[list[str], list[str]]:
    rng = _rng(spec, i)
    n = spec.records_per_field
    taken: set[str] = set()
    fams = _families(rng, int(rng.integers(4, 8)), taken)
    pool_a = _model_pool(rng, fams, int(rng.integers(40, 120)))
    a = _product_records(rng, pool_a, n)
    if matched:
        share = spec.overlap * (1.0 - spec.overlap_spread * rng.random())
        keep = max(1, int(round((0.5 + share) * len(pool_a))))
        picked = rng.choice(len(pool_a), size=min(keep, len(pool_a)), replace=False)
        pool_b = dict(pool_a[int(j)] for j in picked)
        pool_b.update(_model_pool(rng, fams, len(pool_a) - len(pool_b) + 1))
        b = _product_records(rng, sorted(pool_b.items()), n)
    elif rng.random() < spec.hard_negative_rate:
        other = _families(rng, len(fams), taken)
        b = _product_records(rng, _model_pool(rng, other, len(pool_a)), n)
    else:
        make = _OTHER_KINDS[int(rng.integers(len(_OTHER_KINDS)))]
        b = make(rng, n)
    return _inject_noise(a, spec.noise, rng, numeric=False), _inject_noise(b, spec.noise, rng, numeric=False)


# -- assembly ---------------------------------------------------------------------


def generate_synthetic(spec: SynthSpec) -> tuple[list[TableData], list[GroundTruthEntry]]:
    """Tables and ground truth; a pure function of ``spec``."""
    labels = [1] * spec.n_matched + [0] * spec.n_nonmatched
    order = _rng(spec, 10**6).permutation(len(labels))
    labels = [labels[j] for j in order]
    numeric = spec.kind == SynthKind.NUMERIC
    prefix = "n" if numeric else "t"
    field_a, field_b = ("key", "key_ref") if numeric else ("item", "item_code")
    kind = FieldKind.NUMERICAL if numeric else FieldKind.NON_NUMERICAL
    make = _numeric_pair if numeric else _text_pair
    tables, gt = [], []
    for i, label in enumerate(labels):
        a_cells, b_cells = make(spec, i, bool(label))
        ta, tb = f"{prefix}{i:03d}a", f"{prefix}{i:03d}b"
        tables.append(TableData(ta, [FieldColumn(ta, field_a, a_cells, kind)], len(a_cells)))
        tables.append(TableData(tb, [FieldColumn(tb, field_b, b_cells, kind)], len(b_cells)))
        gt.append(GroundTruthEntry(FieldPair.of(FieldId(ta, field_a), FieldId(tb, field_b)), label))
    return tables, gt
