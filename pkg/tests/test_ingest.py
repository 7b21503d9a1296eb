import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nema.base import FieldId, FieldKind, FieldPair
from nema.ingest import (
    Catalog,
    FieldColumn,
    TableData,
    TableError,
    classify_field,
    detect_primary_keys,
    enumerate_candidate_pairs,
    load_manifest,
    load_table,
    parse_number,
    preprocess_numeric,
)


def col(values, name="f", table="t", kind=None):
    return FieldColumn(table, name, list(values), kind)


def table(name, **columns):
    n = len(next(iter(columns.values())))
    return TableData(name, [col(v, k, name) for k, v in columns.items()], n)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestLoadTable:
    def test_toy_shape(self, toy_full_catalog):
        product = toy_full_catalog.table("PRODUCT")
        assert [c.field for c in product.columns] == ["product_id", "family"]
        assert product.row_count == 7

    def test_header_only(self, tmp_path):
        t = load_table(write(tmp_path, "a.csv", "x,y\n"), "a")
        assert t.row_count == 0
        assert [c.raw_records for c in t.columns] == [[], []]

    def test_duplicate_header(self, tmp_path):
        with pytest.raises(TableError, match="duplicate"):
            load_table(write(tmp_path, "a.csv", "id,id\n1,2\n"), "a")

    def test_ragged_row_reports_row_number(self, tmp_path):
        with pytest.raises(TableError, match="row 3"):
            load_table(write(tmp_path, "a.csv", "a,b\n1,2\n3\n"), "a")

    def test_empty_file(self, tmp_path):
        with pytest.raises(TableError, match="header"):
            load_table(write(tmp_path, "a.csv", ""), "a")

    def test_nulls_and_quoting(self, tmp_path):
        t = load_table(write(tmp_path, "a.csv", 'a,b\n"x, y",NULL\n,null\n'), "a")
        assert t.column("a").raw_records == ["x, y", None]
        assert t.column("b").raw_records == [None, None]

    def test_manifest_column_subset(self, toy_catalog):
        assert [c.field for c in toy_catalog.table("ORDER").columns] == ["incident_id", "product_name"]

    def test_manifest_relative_paths(self, tmp_path):
        write(tmp_path, "x.csv", "k\n1\n2\n")
        m = write(tmp_path, "m.json", json.dumps({"tables": {"X": "x.csv"}}))
        [t] = load_manifest(m)
        assert t.name == "X" and t.row_count == 2


class TestClassify:
    def test_product_id_numerical(self):
        assert classify_field(col(["107", "108", "109", "150", "151", "152", "153"])) == FieldKind.NUMERICAL

    def test_family_non_numerical(self):
        values = ["AIR series", "con series", "con series", "47-7000", "cisco0500", "80-7066C", "con5100"]
        assert classify_field(col(values)) == FieldKind.NON_NUMERICAL

    def test_fraction_threshold(self):
        values = [str(i) for i in range(96)] + ["N/A"] * 4
        assert classify_field(col(values), 0.95) == FieldKind.NUMERICAL
        assert classify_field(col(values), 0.97) == FieldKind.NON_NUMERICAL

    def test_all_null(self):
        assert classify_field(col([None, None])) == FieldKind.NON_NUMERICAL

    @pytest.mark.parametrize("cell", ["1e5", "inf", "nan", "0x1f", "1,000", ""])
    def test_not_plain_decimal(self, cell):
        assert parse_number(cell) is None

    @pytest.mark.parametrize("cell,value", [("12", 12.0), ("-3.5", -3.5), (" 7 ", 7.0), (".5", 0.5)])
    def test_plain_decimal(self, cell, value):
        assert parse_number(cell) == value


class TestPreprocessNumeric:
    def test_incident_id(self):
        s = preprocess_numeric(col(["201", "201", "203", "204", "207", "208", "208"], kind=FieldKind.NUMERICAL))
        assert s.values.tolist() == [201, 203, 204, 207, 208]

    def test_removal_rules(self):
        s = preprocess_numeric(col(["5", "-1", None, "x", "5"]))
        assert s.values.tolist() == [5]
        assert s.dropped == 3

    def test_empty(self):
        assert preprocess_numeric(col([])).empty

    def test_rejects_text_field(self):
        with pytest.raises(ValueError):
            preprocess_numeric(col(["a"], kind=FieldKind.NON_NUMERICAL))

    @given(st.lists(st.one_of(st.none(), st.integers(-50, 50).map(str), st.sampled_from(["x", "", "1.5"]))))
    def test_output_sorted_unique_non_negative(self, cells):
        s = preprocess_numeric(col(cells))
        values = s.values.tolist()
        assert values == sorted(set(values))
        assert all(v >= 0 for v in values)
        assert len(values) <= sum(c is not None for c in cells)


class TestPrimaryKeys:
    def test_toy_tables(self, toy_full_catalog):
        assert detect_primary_keys(toy_full_catalog.table("PRODUCT")) == [FieldId("PRODUCT", "product_id")]
        assert detect_primary_keys(toy_full_catalog.table("INCIDENT")) == [FieldId("INCIDENT", "incident_key")]

    def test_every_column_duplicated(self):
        t = Catalog([table("t", a=["1", "1"], b=["2", "2"])]).tables[0]
        assert detect_primary_keys(t) == []

    def test_several_unique_columns(self):
        t = Catalog([table("t", a=["1", "2"], b=["3", "4"])]).tables[0]
        assert detect_primary_keys(t) == [FieldId("t", "a"), FieldId("t", "b")]

    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 1000)), min_size=1, max_size=20), st.randoms())
    def test_invariant_under_row_order(self, rows, rnd):
        def build(rs):
            return Catalog([table("t", a=[str(r[0]) for r in rs], b=[str(r[1]) for r in rs])]).tables[0]

        shuffled = list(rows)
        rnd.shuffle(shuffled)
        assert detect_primary_keys(build(rows)) == detect_primary_keys(build(shuffled))


class TestCandidatePairs:
    def test_toy_pk_constrained(self, toy_catalog):
        pairs = enumerate_candidate_pairs(toy_catalog.tables, FieldKind.NUMERICAL)
        F = FieldId
        assert set(pairs) == {
            FieldPair.of(F("PRODUCT", "product_id"), F("INCIDENT", "incident_key")),
            FieldPair.of(F("PRODUCT", "product_id"), F("INCIDENT", "prod_key")),
            FieldPair.of(F("INCIDENT", "incident_key"), F("ORDER", "incident_id")),
            FieldPair.of(F("PRODUCT", "product_id"), F("ORDER", "incident_id")),
        }

    def test_toy_text_pairs(self, toy_catalog):
        pairs = enumerate_candidate_pairs(toy_catalog.tables, FieldKind.NON_NUMERICAL)
        assert pairs == [FieldPair.of(FieldId("ORDER", "product_name"), FieldId("PRODUCT", "family"))]

    def test_single_table(self):
        cat = Catalog([table("t", a=["1", "2"], b=["3", "4"])])
        assert enumerate_candidate_pairs(cat.tables, FieldKind.NUMERICAL) == []

    @pytest.mark.parametrize("m", [1, 2, 4])
    def test_pk_off_count(self, m):
        cols = {f"c{i}": ["1", "1"] for i in range(m)}
        cat = Catalog([table("x", **cols), table("y", **cols)])
        assert len(enumerate_candidate_pairs(cat.tables, FieldKind.NUMERICAL, pk_constraint=False)) == m * m

    @settings(max_examples=50)
    @given(st.lists(st.lists(st.lists(st.integers(0, 3), min_size=3, max_size=3), min_size=1, max_size=3), min_size=2, max_size=4))
    def test_pk_constraint_subset(self, spec):
        tables = []
        for i, columns in enumerate(spec):
            tables.append(table(f"t{i}", **{f"c{j}": [str(v) for v in c] for j, c in enumerate(columns)}))
        cat = Catalog(tables)
        on = enumerate_candidate_pairs(cat.tables, FieldKind.NUMERICAL, True)
        off = enumerate_candidate_pairs(cat.tables, FieldKind.NUMERICAL, False)
        assert set(on) <= set(off)
        assert all(p.cross_table for p in off)
        assert off == sorted(set(off))


class TestCatalog:
    def test_duplicate_table_names(self):
        with pytest.raises(TableError):
            Catalog([table("t", a=["1"]), table("t", b=["2"])])

    def test_deterministic(self, toy_manifest):
        a = Catalog(load_manifest(toy_manifest))
        b = Catalog(load_manifest(toy_manifest))
        assert {f: c.kind for f, c in a.columns.items()} == {f: c.kind for f, c in b.columns.items()}

    def test_column_length_mismatch(self):
        with pytest.raises(TableError):
            TableData("t", [col(["1", "2"], "a", "t")], 3)


def test_random_row_order_keeps_classification():
    rows = [str(i) for i in range(50)] + ["oops"]
    shuffled = rows[:]
    random.Random(1).shuffle(shuffled)
    assert classify_field(col(rows)) == classify_field(col(shuffled))
