"""Matcher dispatch shared by the command line, the benchmark and the tests.

Each matcher has a preparation step (building numeric sets, token corpora or
record lists) and a scoring step. Only scoring is timed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .base import FieldId, FieldKind, FieldPair, ScoredPair
from .baselines import RecordSimKind, aggregate_pipeline, jaccard_pipeline
from .ingest import Catalog, enumerate_candidate_pairs
from .lsh import LshConfig, lsh_pipeline
from .numeric import NumericMatchConfig, numeric_pipeline
from .textmatch import FieldTokenCorpus, TextMatchConfig, text_pipeline

MATCHERS = ("nema-num", "nema-tpm", "nema-lsh", "jaccard", "agg-ed", "agg-trigram")
MODES = ("num", "text")
DEFAULT_MATCHER = {"num": "nema-num", "text": "nema-tpm"}
MATCHER_MODE = {"nema-num": "num", "nema-tpm": "text", "nema-lsh": "text"}


def mode_kind(mode: str) -> FieldKind:
    return FieldKind.NUMERICAL if mode == "num" else FieldKind.NON_NUMERICAL


@dataclass(frozen=True)
class MatchSettings:
    numeric: NumericMatchConfig = NumericMatchConfig()
    text: TextMatchConfig = TextMatchConfig()
    lsh: LshConfig = LshConfig()
    threshold: float = 0.1  # accept threshold for the baselines
    budget: Optional[float] = None  # seconds, baselines only
    jobs: int = 1


@dataclass
class MatchOutcome:
    matcher: str
    mode: str
    scored: list[ScoredPair]
    seconds: float
    prepare_seconds: float
    extra: dict[str, Any] = field(default_factory=dict)


def candidate_pairs(catalog: Catalog, mode: str, pk_constraint: bool = True) -> list[FieldPair]:
    return enumerate_candidate_pairs(catalog.tables, mode_kind(mode), pk_constraint)


def corpora_for(catalog: Catalog, fields: Sequence[FieldId]) -> dict[FieldId, FieldTokenCorpus]:
    return {f: FieldTokenCorpus.from_records(catalog.columns[f].raw_records, f) for f in fields}


def prepare(matcher: str, mode: str, catalog: Catalog, fields: Sequence[FieldId]) -> dict:
    """The per-field inputs a matcher scores from."""
    if matcher == "nema-num":
        return catalog.numeric_sets()
    if matcher in ("nema-tpm", "nema-lsh"):
        return corpora_for(catalog, fields)
    if matcher == "jaccard":
        if mode == "num":
            return {f: s.as_set() for f, s in catalog.numeric_sets().items()}
        return {f: set().union(*(ts.tokens for ts in c.distinct)) for f, c in corpora_for(catalog, fields).items()}
    return {f: catalog.columns[f].non_null() for f in fields}


def run_matcher(
    matcher: str,
    catalog: Catalog,
    pairs: Sequence[FieldPair],
    settings: MatchSettings = MatchSettings(),
    mode: Optional[str] = None,
) -> MatchOutcome:
    if matcher not in MATCHERS:
        raise ValueError(f"unknown matcher {matcher!r}")
    mode = mode or MATCHER_MODE.get(matcher)
    if mode not in MODES:
        raise ValueError(f"matcher {matcher} needs a mode ({', '.join(MODES)})")
    if MATCHER_MODE.get(matcher, mode) != mode:
        raise ValueError(f"matcher {matcher} does not work in mode {mode}")
    fields = sorted({f for p in pairs for f in (p.a, p.b)})
    t0 = time.perf_counter()
    data = prepare(matcher, mode, catalog, fields)
    t1 = time.perf_counter()
    extra: dict[str, Any] = {}
    if matcher == "nema-num":
        run = numeric_pipeline(pairs, data, settings.numeric, settings.jobs)
        scored = run.all()
        extra["filtered"] = len(run.filtered)
        extra["skipped"] = len(run.skipped)
    elif matcher == "nema-tpm":
        scored = text_pipeline(pairs, data, settings.text, settings.jobs)
    elif matcher == "nema-lsh":
        scored = lsh_pipeline(data, settings.lsh, threshold=settings.text.t_mr, pairs=pairs)
    elif matcher == "jaccard":
        scored = jaccard_pipeline(pairs, data, settings.threshold)
    else:
        kind = RecordSimKind.EDIT_DISTANCE if matcher == "agg-ed" else RecordSimKind.TRIGRAM
        scored = aggregate_pipeline(pairs, data, kind, settings.threshold, settings.budget)
    t2 = time.perf_counter()
    return MatchOutcome(matcher, mode, scored, t2 - t1, t1 - t0, extra)
