import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nema.base import FieldId, FieldPair, ScoredPair
from nema.evalkit import (
    GroundTruthEntry,
    MissingScores,
    accuracy,
    interactive_review,
    read_ground_truth,
    read_pairs,
    sample_record_pairs,
    top_k,
    write_ground_truth,
    write_pairs,
)
from nema.ingest import Catalog, preprocess_numeric
from nema.synth import SynthSpec, generate_synthetic

F = FieldId


def pair(i):
    return FieldPair.of(F(f"t{i:03d}a", "x"), F(f"t{i:03d}b", "y"))


def scored(i, s):
    return ScoredPair(pair(i), {"m": s}, "m")


class TestAccuracy:
    def test_perfect(self):
        gt = [GroundTruthEntry(pair(0), 1), GroundTruthEntry(pair(1), 0)]
        rep = accuracy([scored(0, 0.9), scored(1, 0.1)], gt, 0.5)
        assert (rep.tp, rep.tn, rep.fp, rep.fn) == (1, 1, 0, 0) and rep.accuracy == 1.0

    def test_flipped(self):
        gt = [GroundTruthEntry(pair(0), 1), GroundTruthEntry(pair(1), 0)]
        assert accuracy([scored(0, 0.1), scored(1, 0.9)], gt, 0.5).accuracy == 0.0

    def test_three_errors_in_sixty(self):
        gt = [GroundTruthEntry(pair(i), int(i < 30)) for i in range(60)]
        wrong = {0, 31, 45}
        sc = [scored(i, float((i < 30) != (i in wrong))) for i in range(60)]
        rep = accuracy(sc, gt, 0.5)
        assert rep.accuracy == 0.95 and rep.fn == 1 and rep.fp == 2

    def test_threshold_is_inclusive(self):
        assert accuracy([scored(0, 0.5)], [GroundTruthEntry(pair(0), 1)], 0.5).tp == 1

    def test_missing_scores(self):
        with pytest.raises(MissingScores) as info:
            accuracy([scored(0, 1.0)], [GroundTruthEntry(pair(0), 1), GroundTruthEntry(pair(1), 0)], 0.5)
        assert info.value.pairs == [pair(1)]

    def test_duplicate_ground_truth(self):
        with pytest.raises(ValueError):
            accuracy([scored(0, 1.0)], [GroundTruthEntry(pair(0), 1)] * 2, 0.5)

    def test_bad_label(self):
        with pytest.raises(ValueError):
            GroundTruthEntry(pair(0), 2)

    @given(st.lists(st.tuples(st.floats(0, 1), st.integers(0, 1)), min_size=1, max_size=30), st.floats(0, 1))
    def test_counts_add_up(self, rows, t):
        gt = [GroundTruthEntry(pair(i), y) for i, (_, y) in enumerate(rows)]
        rep = accuracy([scored(i, s) for i, (s, _) in enumerate(rows)], gt, t)
        assert rep.total == len(rows)
        assert rep.tp + rep.fn == sum(y for _, y in rows)
        assert rep.accuracy == sum((s >= t) == bool(y) for s, y in rows) / len(rows)


class TestTopK:
    def test_ties_by_pair_name(self):
        sc = [scored(2, 0.5), scored(1, 0.5), scored(0, 0.9)]
        assert [sp.pair for sp in top_k(sc, 2)] == [pair(0), pair(1)]

    def test_k_larger_than_list(self):
        assert len(top_k([scored(0, 0.1)], 10)) == 1

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            top_k([], 0)


class TestFiles:
    def test_ground_truth_round_trip(self, tmp_path):
        gt = [GroundTruthEntry(pair(i), i % 2) for i in (3, 1, 2)]
        write_ground_truth(gt, tmp_path / "gt.csv")
        assert read_ground_truth(tmp_path / "gt.csv") == sorted(gt, key=lambda e: e.pair)

    def test_ground_truth_header_checked(self, tmp_path):
        (tmp_path / "gt.csv").write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_ground_truth(tmp_path / "gt.csv")

    def test_pairs_round_trip(self, tmp_path):
        write_pairs([pair(2), pair(1), pair(2)], tmp_path / "p.csv")
        assert read_pairs(tmp_path / "p.csv") == [pair(1), pair(2)]

    def test_pairs_canonicalized(self, tmp_path):
        (tmp_path / "p.csv").write_text("table_a,field_a,table_b,field_b,score\nz,f,a,g,0.5\n")
        assert read_pairs(tmp_path / "p.csv") == [FieldPair.of(F("a", "g"), F("z", "f"))]


class Tty(io.StringIO):
    def isatty(self):
        return True


class TestReview:
    top = [scored(0, 0.9), scored(1, 0.8), scored(2, 0.7)]

    def test_accept_all(self):
        assert interactive_review(self.top, accept_all=True) == self.top

    def test_accept_file(self, tmp_path):
        write_pairs([pair(1), pair(9)], tmp_path / "ok.csv")
        assert interactive_review(self.top, accept_file=tmp_path / "ok.csv") == [self.top[1]]

    def test_needs_terminal(self):
        with pytest.raises(RuntimeError):
            interactive_review(self.top, stdin=io.StringIO("a\n"), stdout=io.StringIO())

    def test_answers(self):
        out = io.StringIO()
        got = interactive_review(self.top, lambda p: [("x", "y")], stdin=Tty("a\nwhat\nr\na\n"), stdout=out)
        assert got == [self.top[0], self.top[2]]
        assert "'x'  <->  'y'" in out.getvalue()

    def test_quit_keeps_earlier_decisions(self):
        got = interactive_review(self.top, stdin=Tty("a\nq\n"), stdout=io.StringIO())
        assert got == [self.top[0]]


class TestSamples:
    def test_numeric(self, toy_catalog):
        p = FieldPair.of(F("PRODUCT", "product_id"), F("INCIDENT", "prod_key"))
        got = sample_record_pairs(p, toy_catalog, k=3)
        assert len(got) == 3 and all(a == b for a, b in got)

    def test_text(self, toy_catalog):
        p = FieldPair.of(F("ORDER", "product_name"), F("PRODUCT", "family"))
        got = sample_record_pairs(p, toy_catalog, k=10)
        assert ("cisco0510", "cisco0500") in got or ("cisco0500", "cisco0510") in got


class TestSynth:
    small = dict(n_matched=3, n_nonmatched=3, records_per_field=200)

    @pytest.mark.parametrize("kind", ["numeric", "text"])
    def test_pure_function_of_spec(self, kind):
        spec = SynthSpec(kind=kind, seed=5, **self.small)
        t1, g1 = generate_synthetic(spec)
        t2, g2 = generate_synthetic(spec)
        assert g1 == g2
        assert [c.raw_records for t in t1 for c in t.columns] == [c.raw_records for t in t2 for c in t.columns]
        t3, _ = generate_synthetic(SynthSpec(kind=kind, seed=6, **self.small))
        assert [c.raw_records for t in t1 for c in t.columns] != [c.raw_records for t in t3 for c in t.columns]

    def test_shape(self):
        tables, gt = generate_synthetic(SynthSpec(kind="text", **self.small))
        assert len(tables) == 12 and sorted(e.label for e in gt) == [0, 0, 0, 1, 1, 1]
        assert all(t.row_count == 200 for t in tables)

    def test_full_overlap_gives_identical_sets(self):
        spec = SynthSpec(overlap=1.0, overlap_spread=0.0, noise=0.0, n_matched=3, n_nonmatched=0, records_per_field=100)
        tables, _ = generate_synthetic(spec)
        for ta, tb in zip(tables[::2], tables[1::2]):
            assert set(ta.columns[0].raw_records) == set(tb.columns[0].raw_records)

    def test_numeric_overlap_exact(self):
        spec = SynthSpec(noise=0.0, overlap=0.3, overlap_spread=0.0, records_per_field=500, n_matched=4, n_nonmatched=4)
        tables, gt = generate_synthetic(spec)
        catalog = Catalog(tables)
        for e in gt:
            a = preprocess_numeric(catalog.columns[e.pair.a]).as_set()
            b = preprocess_numeric(catalog.columns[e.pair.b]).as_set()
            assert len(a) == len(b) == 500
            assert len(a & b) == (150 if e.label else 0)

    def test_matched_overlap_exceeds_nonmatched(self):
        tables, gt = generate_synthetic(SynthSpec(n_matched=10, n_nonmatched=10, records_per_field=300, seed=2))
        catalog = Catalog(tables)
        jac = {0: [], 1: []}
        for e in gt:
            a = preprocess_numeric(catalog.columns[e.pair.a]).as_set()
            b = preprocess_numeric(catalog.columns[e.pair.b]).as_set()
            jac[e.label].append(len(a & b) / len(a | b))
        assert np.mean(jac[1]) > np.mean(jac[0])

    @pytest.mark.parametrize(
        "kw", [dict(overlap=1.5), dict(overlap=0.1, nonmatched_overlap=0.2), dict(records_per_field=5),
               dict(n_matched=0, n_nonmatched=0), dict(range_drift=-1.0), dict(kind="graph")]
    )
    def test_spec_validation(self, kw):
        with pytest.raises(ValueError):
            SynthSpec(**kw)
