"""Matching-ratio scoring of non-numerical field pairs.

Three routes compute the per-record match flags behind the matching ratio:

* :func:`match_ratio_bruteforce` compares every record pair (the oracle);
* the exact route (``window=None``) does the same via a sparse token
  incidence product;
* TPM walks both fields in sorted order and compares each record with a
  small window of neighbours around a merge cursor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy import sparse

from .base import FieldId, FieldPair, ScoredPair, assign_ranks
from .parallel import parallel_map
from .textprep import PrepConfig, TokenSet, preprocess_record, record_cosine


@dataclass(frozen=True)
class TextMatchConfig:
    t_rn: float = 0.4
    window: Optional[int] = 16  # None means unbounded (exact)
    top_k: int = 20
    t_mr: float = 0.1  # field-level accept threshold

    def __post_init__(self) -> None:
        if not 0.0 < self.t_rn <= 1.0:
            raise ValueError("t_rn must lie in (0, 1]")
        if self.window is not None and self.window < 1:
            raise ValueError("window must be positive or None")
        if not 0.0 <= self.t_mr <= 1.0:
            raise ValueError("t_mr must lie in [0, 1]")


@dataclass
class FieldTokenCorpus:
    """Preprocessed records of one field; ``order`` sorts them by normalized text."""

    field: Optional[FieldId]
    records: list[TokenSet]
    order: list[int] = field(init=False)
    _distinct: Optional[list[TokenSet]] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.order = sorted(range(len(self.records)), key=lambda i: (self.records[i].key, i))

    @property
    def distinct(self) -> list[TokenSet]:
        """One TokenSet per distinct record text."""
        if self._distinct is None:
            self._distinct = list({ts.source_record: ts for ts in self.records}.values())
        return self._distinct

    @classmethod
    def from_records(
        cls,
        records: Iterable[Optional[str]],
        field_id: Optional[FieldId] = None,
        cfg: PrepConfig = PrepConfig(),
    ) -> "FieldTokenCorpus":
        cache: dict[str, TokenSet] = {}
        out = []
        for r in records:
            if r is None:
                continue
            ts = cache.get(r)
            if ts is None:
                ts = cache[r] = preprocess_record(r, cfg)
            out.append(ts)
        return cls(field_id, out, list(cache.values()))

    def __len__(self) -> int:
        return len(self.records)

    @property
    def sorted_records(self) -> list[TokenSet]:
        return [self.records[i] for i in self.order]


def _require(*corpora: FieldTokenCorpus) -> None:
    for c in corpora:
        if not c.records:
            raise ValueError(f"empty corpus {c.field or ''}".strip())


def _ratio(flags_a: Sequence[bool], flags_b: Sequence[bool]) -> float:
    return 0.5 * (float(np.count_nonzero(flags_a)) / len(flags_a) + float(np.count_nonzero(flags_b)) / len(flags_b))


def match_ratio_bruteforce(a: FieldTokenCorpus, b: FieldTokenCorpus, t_rn: float = 0.4) -> float:
    _require(a, b)
    flags_a = [any(record_cosine(x, y) >= t_rn for y in b.records) for x in a.records]
    flags_b = [any(record_cosine(y, x) >= t_rn for x in a.records) for y in b.records]
    return _ratio(flags_a, flags_b)


def _incidence(corpora: Sequence[FieldTokenCorpus]) -> list[sparse.csr_matrix]:
    vocab: dict[str, int] = {}
    mats = []
    for c in corpora:
        indptr, indices = [0], []
        for ts in c.records:
            indices.extend(vocab.setdefault(t, len(vocab)) for t in ts.tokens)
            indptr.append(len(indices))
        mats.append((indptr, indices))
    out = []
    for indptr, indices in mats:
        data = np.ones(len(indices), dtype=np.int32)
        out.append(sparse.csr_matrix((data, indices, indptr), shape=(len(indptr) - 1, len(vocab))))
    return out


def exact_match_flags(
    a: FieldTokenCorpus, b: FieldTokenCorpus, t_rn: float, chunk: int = 2048
) -> tuple[np.ndarray, np.ndarray]:
    """Per-record match flags over all record pairs, via sparse overlap counts."""
    ma, mb = _incidence([a, b])
    len_a = np.asarray(ma.sum(axis=1)).ravel().astype(np.int64)
    len_b = np.asarray(mb.sum(axis=1)).ravel().astype(np.int64)
    flags_a = np.zeros(len(a), dtype=bool)
    flags_b = np.zeros(len(b), dtype=bool)
    mbt = mb.T.tocsc()
    for start in range(0, ma.shape[0], chunk):
        overlap = (ma[start : start + chunk] @ mbt).tocoo()
        rows = overlap.row + start
        cos = overlap.data / np.sqrt((len_a[rows] * len_b[overlap.col]).astype(np.float64))
        hit = cos >= t_rn
        flags_a[rows[hit]] = True
        flags_b[overlap.col[hit]] = True
    return flags_a, flags_b


def _tpm_walk(
    query: FieldTokenCorpus, target: FieldTokenCorpus, window: int, stop_at: float
) -> tuple[np.ndarray, int]:
    """Best similarity each ``query`` record meets on the windowed sorted walk over ``target``.

    A record's walk ends early once it meets ``stop_at``; whether it reaches any
    threshold up to ``stop_at`` is unaffected by that.
    """
    keys = [target.records[j].key for j in target.order]
    toks = [target.records[j].tokens for j in target.order]
    n = len(keys)
    down_limit, up_limit = (window + 1) // 2, window // 2
    best = np.zeros(len(query))
    comparisons = 0
    cursor = 0
    prev: Optional[TokenSet] = None
    top = 0.0
    for i in query.order:
        rec = query.records[i]
        while cursor < n and keys[cursor] < rec.key:
            cursor += 1
        x = rec.tokens
        if not x:
            continue
        if prev is not None and prev.key == rec.key and prev.tokens == x:
            # same record text as the previous one: same cursor, same walk
            best[i] = top
            continue
        prev = rec
        lx = len(x)
        top = 0.0
        # each direction stops at its budget, or once similarity falls
        down, up = cursor, cursor - 1
        d_prev = u_prev = -1.0
        d_left = down_limit if down < n else 0
        u_left = up_limit if up >= 0 else 0
        while d_left or u_left:
            if d_left:
                y = toks[down]
                s = len(x & y) / math.sqrt(lx * len(y)) if y else 0.0
                comparisons += 1
                if s > top:
                    top = s
                    if s >= stop_at:
                        break
                down += 1
                d_left = 0 if (s < d_prev or down >= n) else d_left - 1
                d_prev = s
            if u_left:
                y = toks[up]
                s = len(x & y) / math.sqrt(lx * len(y)) if y else 0.0
                comparisons += 1
                if s > top:
                    top = s
                    if s >= stop_at:
                        break
                up -= 1
                u_left = 0 if (s < u_prev or up < 0) else u_left - 1
                u_prev = s
        best[i] = top
    return best, comparisons


def _tpm_pass(
    query: FieldTokenCorpus, target: FieldTokenCorpus, t_rn: float, window: int
) -> tuple[np.ndarray, int]:
    best, comparisons = _tpm_walk(query, target, window, t_rn)
    return best >= t_rn, comparisons


@dataclass
class TpmResult:
    score: float
    flags_a: np.ndarray
    flags_b: np.ndarray
    comparisons: Optional[int]  # None for the exact route


def tpm_match(a: FieldTokenCorpus, b: FieldTokenCorpus, cfg: TextMatchConfig = TextMatchConfig()) -> TpmResult:
    _require(a, b)
    if cfg.window is None:
        fa, fb = exact_match_flags(a, b, cfg.t_rn)
        return TpmResult(_ratio(fa, fb), fa, fb, None)
    fa, ca = _tpm_pass(a, b, cfg.t_rn, cfg.window)
    fb, cb = _tpm_pass(b, a, cfg.t_rn, cfg.window)
    return TpmResult(_ratio(fa, fb), fa, fb, ca + cb)


def tpm_match_ratio(a: FieldTokenCorpus, b: FieldTokenCorpus, cfg: TextMatchConfig = TextMatchConfig()) -> float:
    return tpm_match(a, b, cfg).score


def tpm_match_ratios(
    a: FieldTokenCorpus, b: FieldTokenCorpus, thresholds: Sequence[float], window: Optional[int] = 16
) -> list[float]:
    """Matching ratio at several record thresholds from one pair of walks."""
    _require(a, b)
    if window is None:
        return [_ratio(*exact_match_flags(a, b, t)) for t in thresholds]
    stop = max(thresholds)
    best_a, _ = _tpm_walk(a, b, window, stop)
    best_b, _ = _tpm_walk(b, a, window, stop)
    return [_ratio(best_a >= t, best_b >= t) for t in thresholds]


def _score_pair(args: tuple[FieldPair, FieldTokenCorpus, FieldTokenCorpus, TextMatchConfig]) -> ScoredPair:
    pair, ca, cb, cfg = args
    mr = tpm_match_ratio(ca, cb, cfg)
    return ScoredPair(pair, {"mr": mr}, metric="mr", matched=mr >= cfg.t_mr)


def text_pipeline(
    pairs: Sequence[FieldPair],
    corpora: Mapping[FieldId, FieldTokenCorpus],
    cfg: TextMatchConfig = TextMatchConfig(),
    jobs: int = 1,
) -> list[ScoredPair]:
    """Matching ratio for every pair, ranked non-ascending.

    Pairs with an empty side are kept at the end with no score.
    """
    work, skipped = [], []
    for pair in pairs:
        ca, cb = corpora.get(pair.a), corpora.get(pair.b)
        if ca is None or cb is None or not ca.records or not cb.records:
            skipped.append(ScoredPair(pair, metric="mr", note="empty"))
            continue
        work.append((pair, ca, cb, cfg))
    ranked = assign_ranks(parallel_map(_score_pair, work, jobs))
    return ranked + sorted(skipped, key=lambda sp: sp.pair)
