"""Property-graph construction from matched field pairs, with CSV export."""

from __future__ import annotations

import csv
import enum
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .base import FieldId, FieldKind, FieldPair, ScoredPair
from .ingest import Catalog, TableData, detect_primary_keys, is_null, parse_number
from .atomic import atomic_writer
from .textmatch import FieldTokenCorpus, exact_match_flags
from .textprep import preprocess_record, record_cosine

NODE_HEADER = ["id", "table", "field", "value", "labels"]
EDGE_HEADER = ["src", "dst", "relation", "kind"]


class EdgeKind(str, enum.Enum):
    INTRA_ROW = "IntraRow"
    CROSS_MATCH = "CrossMatch"


@dataclass
class GraphNode:
    id: str
    table: str
    field: str
    value: str
    labels: dict[str, list[str]] = field(default_factory=dict)

    def add_labels(self, row: dict[str, Optional[str]]) -> None:
        for name, cell in row.items():
            if name == self.field or is_null(cell):
                continue
            values = self.labels.setdefault(name, [])
            if cell not in values:
                values.append(cell)
                values.sort()


@dataclass(frozen=True, order=True)
class GraphEdge:
    src: str
    dst: str
    relation: str
    kind: EdgeKind

    @classmethod
    def of(cls, x: str, y: str, relation: str, kind: EdgeKind) -> "GraphEdge":
        if x == y:
            raise ValueError(f"self-loop on {x}")
        return cls(*sorted((x, y)), relation, kind)


@dataclass
class PropertyGraph:
    nodes: dict[str, GraphNode] = field(default_factory=dict)
    edges: set[GraphEdge] = field(default_factory=set)
    skipped: list[str] = field(default_factory=list)

    def add_edge(self, edge: GraphEdge) -> None:
        if edge.src not in self.nodes or edge.dst not in self.nodes:
            raise KeyError(f"edge endpoint missing: {edge}")
        self.edges.add(edge)

    def neighbours(self, node_id: str) -> set[str]:
        out = set()
        for e in self.edges:
            if e.src == node_id:
                out.add(e.dst)
            elif e.dst == node_id:
                out.add(e.src)
        return out

    def find(self, table: str, field_name: str, value: str) -> GraphNode:
        return self.nodes[node_id(table, field_name, value)]


def canonical_value(cell: str, kind: Optional[FieldKind]) -> str:
    """Numeric cells collapse by value ("107" and "107.0" are one node)."""
    if kind == FieldKind.NUMERICAL:
        v = parse_number(cell)
        if v is not None:
            return str(int(v)) if v.is_integer() else repr(v)
    return cell


def node_id(table: str, field_name: str, value: str) -> str:
    digest = hashlib.sha1(value.encode("utf-8")).hexdigest()[:12]
    return f"{table}/{field_name}/{digest}"


class _Builder:
    def __init__(self, catalog: Catalog) -> None:
        self.catalog = catalog
        self.graph = PropertyGraph()
        self.pks = {t.name: detect_primary_keys(t) for t in catalog.tables}
        self._done_fields: set[FieldId] = set()

    def _node(self, table: str, field_name: str, value: str) -> GraphNode:
        nid = node_id(table, field_name, value)
        node = self.graph.nodes.get(nid)
        if node is None:
            node = self.graph.nodes[nid] = GraphNode(nid, table, field_name, value)
        return node

    def field_nodes(self, fid: FieldId) -> dict[str, str]:
        """Nodes for every distinct value of a field, wired to their row's key node."""
        table = self.catalog.table(fid.table)
        col = self.catalog.columns[fid]
        pk = self.pks[fid.table][0] if self.pks[fid.table] else None
        pk_col = self.catalog.columns[pk] if pk else None
        by_value: dict[str, str] = {}
        first_visit = fid not in self._done_fields
        self._done_fields.add(fid)
        for i, cell in enumerate(col.raw_records):
            if is_null(cell):
                continue
            value = canonical_value(cell, col.kind)
            node = self._node(fid.table, fid.field, value)
            by_value[value] = node.id
            if not first_visit:
                continue
            node.add_labels(table.row(i))
            if pk_col is None or pk == fid or is_null(pk_col.raw_records[i]):
                continue
            pk_value = canonical_value(pk_col.raw_records[i], pk_col.kind)
            pk_node = self._node(pk.table, pk.field, pk_value)
            pk_node.add_labels(table.row(i))
            self.graph.add_edge(
                GraphEdge.of(node.id, pk_node.id, f"{fid.field}-{pk.field}", EdgeKind.INTRA_ROW)
            )
        return by_value

    def connect(self, pair: FieldPair, t_rn: float) -> None:
        ca, cb = self.catalog.columns.get(pair.a), self.catalog.columns.get(pair.b)
        if ca is None or cb is None or not ca.non_null() or not cb.non_null():
            self.graph.skipped.append(f"{pair}: field without data")
            return
        na, nb = self.field_nodes(pair.a), self.field_nodes(pair.b)
        relation = f"{pair.a.field}-{pair.b.field}"
        if ca.kind == FieldKind.NUMERICAL and cb.kind == FieldKind.NUMERICAL:
            for value in sorted(na.keys() & nb.keys()):
                self.graph.add_edge(GraphEdge.of(na[value], nb[value], relation, EdgeKind.CROSS_MATCH))
            return
        va, vb = sorted(na), sorted(nb)
        corpus_a = FieldTokenCorpus(pair.a, [preprocess_record(v) for v in va])
        corpus_b = FieldTokenCorpus(pair.b, [preprocess_record(v) for v in vb])
        fa, fb = exact_match_flags(corpus_a, corpus_b, t_rn)
        targets = [j for j in range(len(vb)) if fb[j]]
        for i in range(len(va)):
            if not fa[i]:
                continue
            x = corpus_a.records[i]
            for j in targets:
                if record_cosine(x, corpus_b.records[j]) >= t_rn:
                    self.graph.add_edge(GraphEdge.of(na[va[i]], nb[vb[j]], relation, EdgeKind.CROSS_MATCH))


def build_graph(
    tables: Sequence[TableData] | Catalog,
    accepted_pairs: Sequence[ScoredPair | FieldPair],
    t_rn: float = 0.4,
) -> PropertyGraph:
    """Nodes per distinct value of every accepted field; edges for record
    matches across each pair and for row membership (node to row key)."""
    catalog = tables if isinstance(tables, Catalog) else Catalog(list(tables))
    builder = _Builder(catalog)
    pairs = sorted({sp.pair if isinstance(sp, ScoredPair) else sp for sp in accepted_pairs})
    for pair in pairs:
        builder.connect(pair, t_rn)
    return builder.graph


def export_graph(g: PropertyGraph, out_dir: str | Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    nodes_path, edges_path = out_dir / "nodes.csv", out_dir / "edges.csv"
    with atomic_writer(nodes_path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NODE_HEADER)
        for nid in sorted(g.nodes):
            n = g.nodes[nid]
            w.writerow([n.id, n.table, n.field, n.value, json.dumps(n.labels, sort_keys=True, ensure_ascii=False)])
    with atomic_writer(edges_path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EDGE_HEADER)
        for e in sorted(g.edges):
            w.writerow([e.src, e.dst, e.relation, e.kind.value])
    return nodes_path, edges_path


def load_graph(in_dir: str | Path) -> PropertyGraph:
    in_dir = Path(in_dir)
    g = PropertyGraph()
    with (in_dir / "nodes.csv").open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            g.nodes[row["id"]] = GraphNode(row["id"], row["table"], row["field"], row["value"], json.loads(row["labels"]))
    with (in_dir / "edges.csv").open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            g.add_edge(GraphEdge(row["src"], row["dst"], row["relation"], EdgeKind(row["kind"])))
    return g
