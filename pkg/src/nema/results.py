"""Result CSVs: one row per scored field pair, in rank order."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Sequence

from .atomic import atomic_writer
from .base import FieldId, FieldPair, ScoredPair

PAIR_COLUMNS = ["table_a", "field_a", "table_b", "field_b"]

# score columns per matcher; the last one is the ranking metric
MATCHER_SCORES: dict[str, tuple[str, ...]] = {
    "nema-num": ("rds", "bdp"),
    "nema-tpm": ("mr",),
    "nema-lsh": ("mhsim",),
    "jaccard": ("jaccard",),
    "agg-ed": ("agg_ed",),
    "agg-trigram": ("agg_trigram",),
}


def header_for(matcher: str) -> list[str]:
    return PAIR_COLUMNS + list(MATCHER_SCORES[matcher]) + ["rank", "matched", "note"]


def _fmt(v: float | None) -> str:
    return "" if v is None else repr(float(v))


def write_results(scored: Sequence[ScoredPair], path: str | Path, matcher: str) -> Path:
    """Rows in the given order; scores a pair never reached are left blank."""
    columns = MATCHER_SCORES[matcher]
    with atomic_writer(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header_for(matcher))
        for sp in scored:
            p = sp.pair
            w.writerow(
                [p.a.table, p.a.field, p.b.table, p.b.field]
                + [_fmt(sp.scores.get(c)) for c in columns]
                + ["" if sp.rank is None else sp.rank, int(sp.matched), sp.note]
            )
    return Path(path)


def read_results(path: str | Path) -> tuple[str, list[ScoredPair]]:
    """Parse a results file back; the matcher is recognised from the header."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        matcher = next((m for m in MATCHER_SCORES if header == header_for(m)), None)
        if matcher is None:
            raise ValueError(f"{path}: not a results file (header {header})")
        columns = MATCHER_SCORES[matcher]
        out = []
        for row in reader:
            rec = dict(zip(header, row))
            pair = FieldPair.of(FieldId(rec["table_a"], rec["field_a"]), FieldId(rec["table_b"], rec["field_b"]))
            scores = {c: float(rec[c]) for c in columns if rec[c] != ""}
            out.append(
                ScoredPair(
                    pair,
                    scores,
                    metric=columns[-1],
                    rank=int(rec["rank"]) if rec["rank"] else None,
                    matched=rec["matched"] == "1",
                    note=rec["note"],
                )
            )
    return matcher, out
