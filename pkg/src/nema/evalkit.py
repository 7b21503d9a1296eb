"""Ground truth, accuracy, top-k selection and interactive review of results."""

from __future__ import annotations

import csv
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, TextIO

from .atomic import atomic_writer
from .base import FieldId, FieldKind, FieldPair, ScoredPair, rank_key
from .ingest import Catalog, parse_number
from .textprep import preprocess_record, record_cosine

GT_HEADER = ["table_a", "field_a", "table_b", "field_b", "label"]
PAIR_HEADER = GT_HEADER[:4]


@dataclass(frozen=True)
class GroundTruthEntry:
    pair: FieldPair
    label: int

    def __post_init__(self) -> None:
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label}")


@dataclass
class EvalReport:
    tp: int
    tn: int
    fp: int
    fn: int
    wall_time: dict[str, float] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0


class MissingScores(KeyError):
    def __init__(self, pairs: Sequence[FieldPair]) -> None:
        super().__init__(f"{len(pairs)} ground-truth pairs have no score: " + ", ".join(map(str, pairs)))
        self.pairs = list(pairs)


def check_ground_truth(gt: Iterable[GroundTruthEntry]) -> list[GroundTruthEntry]:
    gt = list(gt)
    seen: set[FieldPair] = set()
    for e in gt:
        if e.pair in seen:
            raise ValueError(f"duplicate ground-truth pair {e.pair}")
        seen.add(e.pair)
    return gt


def accuracy(scored: Sequence[ScoredPair], gt: Sequence[GroundTruthEntry], threshold: float) -> EvalReport:
    """Predict a match iff score >= threshold; pairs never scored count as 0."""
    by_pair = {sp.pair: sp.score for sp in scored}
    gt = check_ground_truth(gt)
    missing = [e.pair for e in gt if e.pair not in by_pair]
    if missing:
        raise MissingScores(missing)
    tp = tn = fp = fn = 0
    for e in gt:
        predicted = by_pair[e.pair] >= threshold
        if e.label:
            tp += predicted
            fn += not predicted
        else:
            fp += predicted
            tn += not predicted
    return EvalReport(tp, tn, fp, fn)


def top_k(scored: Sequence[ScoredPair], k: int) -> list[ScoredPair]:
    if k < 1:
        raise ValueError("k must be >= 1")
    return sorted(scored, key=rank_key)[:k]


# -- pair files -----------------------------------------------------------------


def _pair_from_row(row: dict[str, str]) -> FieldPair:
    return FieldPair.of(FieldId(row["table_a"], row["field_a"]), FieldId(row["table_b"], row["field_b"]))


def _pair_cells(p: FieldPair) -> list[str]:
    return [p.a.table, p.a.field, p.b.table, p.b.field]


def read_ground_truth(path: str | Path) -> list[GroundTruthEntry]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != GT_HEADER:
            raise ValueError(f"{path}: expected header {','.join(GT_HEADER)}")
        return check_ground_truth(GroundTruthEntry(_pair_from_row(r), int(r["label"])) for r in reader)


def write_ground_truth(gt: Iterable[GroundTruthEntry], path: str | Path) -> None:
    with atomic_writer(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(GT_HEADER)
        for e in sorted(gt, key=lambda e: e.pair):
            w.writerow(_pair_cells(e.pair) + [e.label])


def read_pairs(path: str | Path) -> list[FieldPair]:
    """Field pairs from any CSV carrying the four pair columns."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or not set(PAIR_HEADER) <= set(reader.fieldnames):
            raise ValueError(f"{path}: missing pair columns {','.join(PAIR_HEADER)}")
        return sorted({_pair_from_row(r) for r in reader})


def write_pairs(pairs: Iterable[FieldPair], path: str | Path) -> None:
    with atomic_writer(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PAIR_HEADER)
        for p in sorted(set(pairs)):
            w.writerow(_pair_cells(p))


# -- review -------------------------------------------------------------------------


def sample_record_pairs(
    pair: FieldPair, catalog: Catalog, k: int = 5, t_rn: float = 0.4
) -> list[tuple[str, str]]:
    """Up to ``k`` matching record pairs, as shown to a reviewer."""
    ca, cb = catalog.columns[pair.a], catalog.columns[pair.b]
    va, vb = sorted(set(ca.non_null())), sorted(set(cb.non_null()))
    out: list[tuple[str, str]] = []
    if ca.kind == FieldKind.NUMERICAL and cb.kind == FieldKind.NUMERICAL:
        index = {}
        for v in vb:
            index.setdefault(parse_number(v), v)
        for v in va:
            x = parse_number(v)
            if x is not None and x in index:
                out.append((v, index[x]))
                if len(out) == k:
                    break
        return out
    tb = [preprocess_record(v) for v in vb]
    for v in va:
        x = preprocess_record(v)
        best = max(range(len(vb)), key=lambda j: record_cosine(x, tb[j]), default=None)
        if best is not None and record_cosine(x, tb[best]) >= t_rn:
            out.append((v, vb[best]))
            if len(out) == k:
                break
    return out


def interactive_review(
    topk: Sequence[ScoredPair],
    samples: Optional[Callable[[FieldPair], list[tuple[str, str]]]] = None,
    stdin: TextIO = sys.stdin,
    stdout: TextIO = sys.stdout,
    accept_all: bool = False,
    accept_file: Optional[str | Path] = None,
) -> list[ScoredPair]:
    """Ask accept/reject/quit for each pair; quitting keeps the decisions so far.

    Without a terminal the caller must choose ``accept_all`` or ``accept_file``.
    """
    if accept_all:
        return list(topk)
    if accept_file is not None:
        wanted = set(read_pairs(accept_file))
        return [sp for sp in topk if sp.pair in wanted]
    if not stdin.isatty():
        raise RuntimeError("review needs a terminal; use --accept-all or --accept-file")
    accepted = []
    for sp in topk:
        scores = " ".join(f"{k}={v:.4f}" for k, v in sorted(sp.scores.items()))
        print(f"\n#{sp.rank} {sp.pair}  {scores}", file=stdout)
        for ra, rb in (samples(sp.pair) if samples else []):
            print(f"    {ra!r}  <->  {rb!r}", file=stdout)
        while True:
            stdout.write("[a]ccept / [r]eject / [q]uit? ")
            stdout.flush()
            answer = stdin.readline().strip().lower()[:1]
            if answer in ("a", "r", "q"):
                break
        if answer == "q":
            break
        if answer == "a":
            accepted.append(sp)
    return accepted
