"""Range-difference and bucket-dot-product scoring of numerical fields."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .base import FieldId, FieldPair, ScoredPair, assign_ranks
from .ingest import NumericSet
from .parallel import parallel_map

PERCENTILES = (10, 20, 30, 40, 50, 60, 70, 80, 90)
RD_PERCENTILES = (20, 30, 80, 90)


@dataclass(frozen=True)
class PercentileProfile:
    values: tuple[float, ...]

    def __getitem__(self, q: int) -> float:
        return self.values[PERCENTILES.index(q)]


@dataclass(frozen=True)
class NumericMatchConfig:
    t_r: float = 0.1
    t_b: float = 0.1
    bucket_count: int = 50_000
    top_k: int = 20

    def __post_init__(self) -> None:
        for name in ("t_r", "t_b"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.bucket_count < 1 or self.top_k < 1:
            raise ValueError("bucket_count and top_k must be positive")


def _require(s: NumericSet) -> np.ndarray:
    if s.empty:
        raise ValueError(f"empty numeric set {s.source or ''}".strip())
    return s.values


def percentile(sorted_values: np.ndarray, q: float) -> float:
    """Linear interpolation at index ``q/100 * (n-1)`` of a sorted array."""
    n = sorted_values.size
    pos = q / 100.0 * (n - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, n - 1)
    frac = pos - lo
    return float(sorted_values[lo] + (sorted_values[hi] - sorted_values[lo]) * frac)


def percentile_profile(s: NumericSet) -> PercentileProfile:
    values = _require(s)
    return PercentileProfile(tuple(percentile(values, q) for q in PERCENTILES))


def rd_similarity(a: NumericSet, b: NumericSet) -> float:
    pa, pb = percentile_profile(a), percentile_profile(b)
    total = 0.0
    for q in RD_PERCENTILES:
        x, y = pa[q], pb[q]
        denom = abs(x + y)
        total += abs(x - y) / denom if denom > 0 else 0.0
    return 1.0 - total / len(RD_PERCENTILES)


def occupied_buckets(values: np.ndarray, lo: float, hi: float, bucket_count: int) -> np.ndarray:
    """Indices of equal-width buckets over [lo, hi] holding at least one value.

    The last bucket is closed on the right.
    """
    if hi <= lo:
        return np.zeros(1, dtype=np.int64)
    idx = np.floor((values - lo) / (hi - lo) * bucket_count).astype(np.int64)
    np.clip(idx, 0, bucket_count - 1, out=idx)
    return np.unique(idx)


def bdp_similarity(a: NumericSet, b: NumericSet, bucket_count: int = 50_000) -> float:
    """Cosine of the bucket-occupancy indicator vectors over the joint range."""
    if bucket_count < 1:
        raise ValueError("bucket_count must be >= 1")
    va, vb = _require(a), _require(b)
    lo = min(va[0], vb[0])
    hi = max(va[-1], vb[-1])
    ia = occupied_buckets(va, lo, hi, bucket_count)
    ib = occupied_buckets(vb, lo, hi, bucket_count)
    common = np.intersect1d(ia, ib, assume_unique=True).size
    if common == 0:
        return 0.0
    return common / math.sqrt(ia.size * ib.size)


@dataclass
class NumericRun:
    """Outcome of the two-stage numeric pipeline.

    ``ranked`` holds the stage-2 survivors sorted by BDP; ``filtered`` the
    pairs dropped by the RD filter; ``skipped`` pairs with an empty side.
    """

    ranked: list[ScoredPair] = field(default_factory=list)
    filtered: list[ScoredPair] = field(default_factory=list)
    skipped: list[ScoredPair] = field(default_factory=list)
    top_k: int = 20

    @property
    def top(self) -> list[ScoredPair]:
        return self.ranked[: self.top_k]

    @property
    def matched(self) -> list[ScoredPair]:
        return [sp for sp in self.ranked if sp.matched]

    def all(self) -> list[ScoredPair]:
        return self.ranked + self.filtered + self.skipped


def _score_pair(args: tuple[FieldPair, NumericSet, NumericSet, NumericMatchConfig]) -> ScoredPair:
    pair, sa, sb, cfg = args
    rds = rd_similarity(sa, sb)
    scores = {"rds": rds}
    if rds >= cfg.t_r:
        scores["bdp"] = bdp_similarity(sa, sb, cfg.bucket_count)
    return ScoredPair(pair, scores, metric="bdp")


def numeric_pipeline(
    pairs: Sequence[FieldPair],
    sets: Mapping[FieldId, NumericSet],
    cfg: NumericMatchConfig = NumericMatchConfig(),
    jobs: int = 1,
) -> NumericRun:
    run = NumericRun(top_k=cfg.top_k)
    work = []
    for pair in pairs:
        sa, sb = sets.get(pair.a), sets.get(pair.b)
        missing = [str(f) for f, s in ((pair.a, sa), (pair.b, sb)) if s is None or s.empty]
        if missing:
            run.skipped.append(ScoredPair(pair, metric="bdp", note="empty: " + ",".join(missing)))
            continue
        work.append((pair, sa, sb, cfg))
    for sp in parallel_map(_score_pair, work, jobs):
        if "bdp" in sp.scores:
            sp.matched = sp.scores["bdp"] >= cfg.t_b
            run.ranked.append(sp)
        else:
            sp.note = "rd-filtered"
            run.filtered.append(sp)
    assign_ranks(run.ranked)
    run.filtered.sort(key=lambda sp: sp.pair)
    run.skipped.sort(key=lambda sp: sp.pair)
    return run
