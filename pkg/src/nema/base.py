"""Identity and result types shared by every matcher."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional


class FieldKind(str, enum.Enum):
    NUMERICAL = "Numerical"
    NON_NUMERICAL = "NonNumerical"


@dataclass(frozen=True, order=True)
class FieldId:
    """A column identity, ordered lexicographically by ``table.field``."""

    table: str
    field: str

    def __str__(self) -> str:
        return f"{self.table}.{self.field}"

    @classmethod
    def parse(cls, text: str) -> "FieldId":
        table, sep, name = text.partition(".")
        if not sep or not table or not name:
            raise ValueError(f"expected 'table.field', got {text!r}")
        return cls(table, name)


@dataclass(frozen=True, order=True)
class FieldPair:
    """An unordered field pair stored in canonical order (``a < b``)."""

    a: FieldId
    b: FieldId

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError(f"a field cannot pair with itself: {self.a}")
        if self.b < self.a:
            raise ValueError("FieldPair must be canonical; use FieldPair.of()")

    @classmethod
    def of(cls, x: FieldId, y: FieldId) -> "FieldPair":
        return cls(x, y) if x < y else cls(y, x)

    @property
    def cross_table(self) -> bool:
        return self.a.table != self.b.table

    def __str__(self) -> str:
        return f"({self.a}, {self.b})"


@dataclass
class ScoredPair:
    """A candidate pair with its per-metric scores.

    ``metric`` names the score used for ranking and thresholding. A pair that
    never reached that stage (filtered early or skipped) has ``score == 0``.
    """

    pair: FieldPair
    scores: dict[str, float] = field(default_factory=dict)
    metric: str = ""
    rank: Optional[int] = None
    matched: bool = False
    note: str = ""

    @property
    def score(self) -> float:
        return self.scores.get(self.metric, 0.0)

    def __post_init__(self) -> None:
        self.scores = {name: float(value) for name, value in self.scores.items()}
        for name, value in self.scores.items():
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"score {name}={value} outside [0, 1] for {self.pair}")


def rank_key(sp: ScoredPair) -> tuple:
    # non-ascending score, then canonical pair order
    return (-sp.score, sp.pair)


def assign_ranks(scored: list[ScoredPair]) -> list[ScoredPair]:
    """Sort in place by score (ties by pair name) and number ranks from 1."""
    scored.sort(key=rank_key)
    for i, sp in enumerate(scored, start=1):
        sp.rank = i
    return scored
