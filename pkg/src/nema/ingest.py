"""Table loading, field classification, numeric cleaning and candidate pairs."""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .base import FieldId, FieldKind, FieldPair

NULL_TOKENS = frozenset({"", "NULL", "null"})
DEFAULT_NUMERIC_FRACTION = 0.95

# integer or plain decimal; no exponent, no thousands separators
_NUMBER_RE = re.compile(r"^[+-]?(?:\d+(?:\.\d*)?|\.\d+)$")


class TableError(ValueError):
    """Raised for malformed table input."""


def is_null(cell: Optional[str]) -> bool:
    return cell is None or cell.strip() in NULL_TOKENS


def parse_number(cell: Optional[str]) -> Optional[float]:
    """Return the finite value of a decimal cell, or None if it is not one."""
    if cell is None:
        return None
    text = cell.strip()
    if not _NUMBER_RE.match(text):
        return None
    value = float(text)
    return value if math.isfinite(value) else None


@dataclass
class FieldColumn:
    table: str
    field: str
    raw_records: list[Optional[str]]
    kind: Optional[FieldKind] = None

    @property
    def id(self) -> FieldId:
        return FieldId(self.table, self.field)

    def non_null(self) -> list[str]:
        return [r for r in self.raw_records if not is_null(r)]


@dataclass
class TableData:
    name: str
    columns: list[FieldColumn]
    row_count: int

    def __post_init__(self) -> None:
        names = [c.field for c in self.columns]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise TableError(f"table {self.name!r}: duplicate column names {dupes}")
        for col in self.columns:
            if len(col.raw_records) != self.row_count:
                raise TableError(
                    f"table {self.name!r}: column {col.field!r} has "
                    f"{len(col.raw_records)} cells, expected {self.row_count}"
                )

    def column(self, name: str) -> FieldColumn:
        for col in self.columns:
            if col.field == name:
                return col
        raise KeyError(f"{self.name}.{name}")

    def row(self, i: int) -> dict[str, Optional[str]]:
        return {c.field: c.raw_records[i] for c in self.columns}

    def select(self, names: Sequence[str]) -> "TableData":
        """A copy keeping only the named columns, in the given order."""
        return TableData(self.name, [self.column(n) for n in names], self.row_count)


@dataclass
class NumericSet:
    """Sorted, unique, non-negative finite values of one numerical field."""

    values: np.ndarray
    source: Optional[FieldId] = None
    dropped: int = 0

    def __post_init__(self) -> None:
        self.values = np.unique(np.asarray(self.values, dtype=np.float64))

    @classmethod
    def of(cls, values: Iterable[float], source: Optional[FieldId] = None) -> "NumericSet":
        return cls(np.fromiter(values, dtype=np.float64), source)

    @property
    def empty(self) -> bool:
        return self.values.size == 0

    def __len__(self) -> int:
        return int(self.values.size)

    def as_set(self) -> set[float]:
        return set(self.values.tolist())


def load_table(path: str | Path, table_name: str) -> TableData:
    """Read an RFC 4180 CSV with a mandatory header row."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, strict=True)
        try:
            header = next(reader)
        except StopIteration:
            raise TableError(f"{path}: empty file, header row required") from None
        except csv.Error as exc:
            raise TableError(f"{path}: row 1: {exc}") from None
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise TableError(f"{path}: duplicate header names {dupes}")
        cells: list[list[Optional[str]]] = [[] for _ in header]
        row_no = 1
        try:
            for row_no, row in enumerate(reader, start=2):
                if len(row) != len(header):
                    raise TableError(
                        f"{path}: row {row_no}: expected {len(header)} fields, got {len(row)}"
                    )
                for j, cell in enumerate(row):
                    cells[j].append(None if is_null(cell) else cell)
        except csv.Error as exc:
            raise TableError(f"{path}: row {row_no + 1}: {exc}") from None
    n_rows = len(cells[0]) if cells else 0
    columns = [FieldColumn(table_name, h, col) for h, col in zip(header, cells)]
    return TableData(table_name, columns, n_rows)


def load_manifest(path: str | Path) -> list[TableData]:
    """Load every table listed in a JSON manifest.

    The manifest maps table names to CSV paths (relative to the manifest),
    either directly or as ``{"path": ..., "columns": [...]}`` to keep a subset
    of columns.
    """
    path = Path(path)
    spec = json.loads(path.read_text(encoding="utf-8"))
    entries = spec.get("tables", spec)
    tables = []
    for name, entry in entries.items():
        if isinstance(entry, str):
            entry = {"path": entry}
        table = load_table(path.parent / entry["path"], name)
        if entry.get("columns"):
            table = table.select(entry["columns"])
        tables.append(table)
    return tables


def classify_field(col: FieldColumn, numeric_fraction: float = DEFAULT_NUMERIC_FRACTION) -> FieldKind:
    values = col.non_null()
    if not values:
        return FieldKind.NON_NUMERICAL
    parsed = sum(parse_number(v) is not None for v in values)
    if parsed >= numeric_fraction * len(values):
        return FieldKind.NUMERICAL
    return FieldKind.NON_NUMERICAL


def classify_table(table: TableData, numeric_fraction: float = DEFAULT_NUMERIC_FRACTION) -> TableData:
    for col in table.columns:
        if col.kind is None:
            col.kind = classify_field(col, numeric_fraction)
    return table


def preprocess_numeric(col: FieldColumn) -> NumericSet:
    """Drop nulls, negatives and unparsable cells; keep unique values.

    An all-invalid column yields an empty set (``.empty``), which scorers
    skip and report rather than score.
    """
    if col.kind is not None and col.kind != FieldKind.NUMERICAL:
        raise ValueError(f"{col.id} is not a numerical field")
    values = []
    for cell in col.raw_records:
        v = parse_number(cell)
        if v is not None and v >= 0:
            values.append(v)
    out = NumericSet.of(values, col.id)
    out.dropped = len(col.raw_records) - len(values)
    return out


def detect_primary_keys(table: TableData) -> list[FieldId]:
    """Numerical fields with no nulls and all-distinct values."""
    keys = []
    for col in table.columns:
        if col.kind != FieldKind.NUMERICAL or table.row_count == 0:
            continue
        if any(is_null(r) for r in col.raw_records):
            continue
        parsed = [parse_number(r) for r in col.raw_records]
        if any(p is None for p in parsed):
            continue
        if len(set(parsed)) == len(parsed):
            keys.append(col.id)
    return keys


def enumerate_candidate_pairs(
    tables: Sequence[TableData],
    kind: FieldKind,
    pk_constraint: bool = True,
) -> list[FieldPair]:
    """Cross-table pairs of same-kind fields, canonical and deduplicated.

    With ``pk_constraint`` (numerical fields only) each pair must contain a
    primary key of its own table.
    """
    fields = [
        (c.id, t.name)
        for t in tables
        for c in t.columns
        if c.kind == kind
    ]
    pks: set[FieldId] = set()
    if pk_constraint and kind == FieldKind.NUMERICAL:
        for t in tables:
            pks.update(detect_primary_keys(t))
    use_pk = pk_constraint and kind == FieldKind.NUMERICAL
    pairs = set()
    for (x, tx), (y, ty) in combinations(fields, 2):
        if tx == ty:
            continue
        if use_pk and x not in pks and y not in pks:
            continue
        pairs.add(FieldPair.of(x, y))
    return sorted(pairs)


@dataclass
class Catalog:
    """Classified tables plus per-field derived data, keyed by FieldId."""

    tables: list[TableData]
    numeric_fraction: float = DEFAULT_NUMERIC_FRACTION
    columns: dict[FieldId, FieldColumn] = field(init=False)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for t in self.tables:
            if t.name in seen:
                raise TableError(f"duplicate table name {t.name!r}")
            seen.add(t.name)
            classify_table(t, self.numeric_fraction)
        self.columns = {c.id: c for t in self.tables for c in t.columns}

    def fields(self, kind: FieldKind) -> list[FieldId]:
        return [fid for fid, c in self.columns.items() if c.kind == kind]

    def numeric_sets(self) -> dict[FieldId, NumericSet]:
        return {fid: preprocess_numeric(self.columns[fid]) for fid in self.fields(FieldKind.NUMERICAL)}

    def table(self, name: str) -> TableData:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)
