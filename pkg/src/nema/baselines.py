"""Reference matchers: set Jaccard and aggregated-maximum record similarity."""

from __future__ import annotations

import enum
import time
from typing import AbstractSet, Callable, Iterable, Mapping, Optional, Sequence

import numpy as np
from rapidfuzz.distance import Levenshtein
from rapidfuzz.process import cdist
from scipy import sparse

from .base import FieldId, FieldPair, ScoredPair, assign_ranks

TRIGRAM_PAD = "\x02\x02"
TRIGRAM_PAD_END = "\x03\x03"


class RecordSimKind(str, enum.Enum):
    EDIT_DISTANCE = "ed"
    TRIGRAM = "trigram"


class BudgetExceeded(RuntimeError):
    """A baseline run stopped at its time budget before finishing."""

    def __init__(self, elapsed: float, done: int, total: int) -> None:
        super().__init__(f"stopped after {elapsed:.1f}s with {done}/{total} pairs scored")
        self.elapsed = elapsed
        self.done = done
        self.total = total


def jaccard(a: AbstractSet, b: AbstractSet) -> float:
    if not a and not b:
        return 0.0
    inter = len(a & b)
    return inter / (len(a) + len(b) - inter)


def edit_distance_sim(s1: str, s2: str) -> float:
    """1 - levenshtein / max length, unit costs; two empty strings score 1."""
    if not s1 and not s2:
        return 1.0
    return Levenshtein.normalized_similarity(s1, s2)


def trigrams(s: str) -> frozenset[str]:
    padded = TRIGRAM_PAD + s + TRIGRAM_PAD_END
    return frozenset(padded[i : i + 3] for i in range(len(padded) - 2))


def trigram_sim(s1: str, s2: str) -> float:
    """Dice coefficient over boundary-padded trigram sets."""
    if not s1 and not s2:
        return 1.0
    t1, t2 = trigrams(s1), trigrams(s2)
    return 2 * len(t1 & t2) / (len(t1) + len(t2))


_RECORD_SIM: dict[RecordSimKind, Callable[[str, str], float]] = {
    RecordSimKind.EDIT_DISTANCE: edit_distance_sim,
    RecordSimKind.TRIGRAM: trigram_sim,
}


def _ed_matrix_maxima(a: Sequence[str], b: Sequence[str], chunk: int) -> tuple[np.ndarray, np.ndarray]:
    row_max = np.zeros(len(a))
    col_max = np.zeros(len(b))
    for start in range(0, len(a), chunk):
        block = cdist(a[start : start + chunk], b, scorer=Levenshtein.normalized_similarity, dtype=np.float64)
        row_max[start : start + chunk] = block.max(axis=1)
        np.maximum(col_max, block.max(axis=0), out=col_max)
    # rapidfuzz scores two empty strings as 1 already; nothing to patch
    return row_max, col_max


def _trigram_matrix_maxima(a: Sequence[str], b: Sequence[str], chunk: int) -> tuple[np.ndarray, np.ndarray]:
    vocab: dict[str, int] = {}

    def incidence(records: Sequence[str]) -> sparse.csr_matrix:
        indptr, indices = [0], []
        for r in records:
            indices.extend(vocab.setdefault(t, len(vocab)) for t in trigrams(r))
            indptr.append(len(indices))
        return indptr, indices

    raw = [incidence(a), incidence(b)]
    ma, mb = (
        sparse.csr_matrix((np.ones(len(ix)), ix, ip), shape=(len(ip) - 1, len(vocab)))
        for ip, ix in raw
    )
    size_a = np.asarray(ma.sum(axis=1)).ravel()
    size_b = np.asarray(mb.sum(axis=1)).ravel()
    mbt = mb.T.tocsc()
    row_max = np.zeros(len(a))
    col_max = np.zeros(len(b))
    for start in range(0, len(a), chunk):
        inter = (ma[start : start + chunk] @ mbt).toarray()
        dice = 2 * inter / (size_a[start : start + chunk, None] + size_b[None, :])
        row_max[start : start + chunk] = dice.max(axis=1)
        np.maximum(col_max, dice.max(axis=0), out=col_max)
    return row_max, col_max


def aggregate_max_sim(
    a: Sequence[str],
    b: Sequence[str],
    kind: RecordSimKind = RecordSimKind.EDIT_DISTANCE,
    chunk: int = 512,
) -> float:
    """Mean over both sides of each record's best match on the other side."""
    if not a or not b:
        raise ValueError("aggregate_max_sim needs two non-empty record lists")
    a, b = list(a), list(b)
    kind = RecordSimKind(kind)
    if kind == RecordSimKind.EDIT_DISTANCE:
        row_max, col_max = _ed_matrix_maxima(a, b, chunk)
    else:
        row_max, col_max = _trigram_matrix_maxima(a, b, chunk)
    return float((row_max.sum() + col_max.sum()) / (len(a) + len(b)))


def aggregate_max_sim_naive(a: Sequence[str], b: Sequence[str], kind: RecordSimKind) -> float:
    """Direct double loop over the record similarity; the reference for small inputs."""
    sim = _RECORD_SIM[RecordSimKind(kind)]
    left = sum(max(sim(x, y) for y in b) for x in a)
    right = sum(max(sim(y, x) for x in a) for y in b)
    return (left + right) / (len(a) + len(b))


def jaccard_pipeline(
    pairs: Sequence[FieldPair],
    sets: Mapping[FieldId, AbstractSet],
    threshold: float = 0.1,
) -> list[ScoredPair]:
    ranked = []
    for p in pairs:
        sa, sb = sets.get(p.a), sets.get(p.b)
        if not sa or not sb:
            ranked.append(ScoredPair(p, metric="jaccard", note="empty"))
            continue
        j = jaccard(sa, sb)
        ranked.append(ScoredPair(p, {"jaccard": j}, metric="jaccard", matched=j >= threshold))
    return assign_ranks(ranked)


def aggregate_pipeline(
    pairs: Sequence[FieldPair],
    records: Mapping[FieldId, Sequence[str]],
    kind: RecordSimKind = RecordSimKind.EDIT_DISTANCE,
    threshold: float = 0.1,
    budget: Optional[float] = None,
) -> list[ScoredPair]:
    """Score pairs with :func:`aggregate_max_sim`.

    With ``budget`` (seconds) the run raises :class:`BudgetExceeded` once the
    elapsed time passes it.
    """
    kind = RecordSimKind(kind)
    metric = "agg_" + kind.value
    start = time.perf_counter()
    ranked = []
    for done, p in enumerate(pairs):
        if budget is not None and time.perf_counter() - start > budget:
            raise BudgetExceeded(time.perf_counter() - start, done, len(pairs))
        ra, rb = records.get(p.a), records.get(p.b)
        if not ra or not rb:
            ranked.append(ScoredPair(p, metric=metric, note="empty"))
            continue
        s = min(1.0, aggregate_max_sim(ra, rb, kind))
        ranked.append(ScoredPair(p, {metric: s}, metric=metric, matched=s >= threshold))
    return assign_ranks(ranked)


def non_null(records: Iterable[Optional[str]]) -> list[str]:
    return [r for r in records if r is not None]
