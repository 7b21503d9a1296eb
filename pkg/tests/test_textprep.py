import math
import re

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nema.textprep import PrepConfig, mask_digits, normalize, preprocess_record, record_cosine, stem

record_text = st.text(alphabet="abcXYZ0123456789-_/=, .", max_size=30)
token_sets = st.frozensets(st.text(alphabet="abcd01", min_size=1, max_size=4), max_size=8)


def tokens(record, **kw):
    return set(preprocess_record(record, PrepConfig(**kw)).tokens)


class TestPreprocess:
    def test_hyphenated_part_number(self):
        assert tokens("mem-4700m-64d=") == {"4700", "64", "4700m", "d", "m", "mem 4700m 64d", "64d", "mem", "47xx"}

    def test_single_word(self):
        assert tokens("cisco0510") == {"cisco", "0510", "cisco0510", "05xx"}

    def test_separators_only(self):
        assert len(preprocess_record("---")) == 0

    def test_case_folded(self):
        assert tokens("AIR35CE") == tokens("air35ce")

    def test_stems_words(self):
        assert "seri" in tokens("c900 series")

    def test_short_digit_runs_unmasked(self):
        assert tokens("c900") == {"c900", "c", "900"}

    def test_custom_prefix(self):
        assert "470x" in tokens("4700", prefix_len=3)

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            PrepConfig(prefix_len=4, mask_min_len=4)

    def test_sort_key_is_normalized_record(self):
        assert preprocess_record("  Mem-4700M ").key == "mem 4700m"

    @given(record_text)
    def test_deterministic(self, r):
        assert preprocess_record(r) == preprocess_record(r)

    @given(st.text(alphabet="abc0123456789- ", max_size=30))
    def test_masked_tokens_keep_length_and_prefix(self, r):
        toks = tokens(r)
        masks = {t for t in toks if re.fullmatch(r"\d+x+", t)}
        runs = {d for d in toks if d.isdigit() and len(d) >= 4}
        assert masks == {mask_digits(d, 2) for d in runs}
        for m in masks:
            assert any(len(d) == len(m) and d[:2] == m[:2] for d in runs)

    @given(record_text)
    def test_pure_tokens_are_fixed_points(self, r):
        for t in tokens(r):
            if t.isalpha() or t.isdigit():
                assert t in tokens(t)
                assert tokens(t) <= tokens(r) | {t} | {mask_digits(t, 2)}

    @given(record_text)
    def test_words_come_from_normalize(self, r):
        words = normalize(r)
        full = " ".join(words)
        if len(words) >= 2:
            assert full in tokens(r)


class TestStem:
    @given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=12))
    def test_fixpoint(self, w):
        assert stem(stem(w)) == stem(w)

    def test_known(self):
        assert stem("series") == "seri"


def test_mask_digits():
    assert mask_digits("4700", 2) == "47xx"
    assert mask_digits("123456", 3) == "123xxx"


class TestCosine:
    def test_worked_example(self):
        x = frozenset({"cisco", "0510", "cisco0510", "05xx"})
        y = frozenset({"cisco", "05xx", "0500", "cisco0500"})
        assert record_cosine(x, y) == 0.5

    def test_identical(self):
        assert record_cosine(frozenset({"a"}), frozenset({"a"})) == 1.0

    def test_disjoint(self):
        assert record_cosine(frozenset({"a"}), frozenset({"b"})) == 0.0

    def test_empty_side(self):
        assert record_cosine(frozenset(), frozenset({"a"})) == 0.0

    @given(token_sets, token_sets)
    def test_binary_vector_oracle(self, x, y):
        universe = sorted(x | y)
        vx = [int(t in x) for t in universe]
        vy = [int(t in y) for t in universe]
        dot = sum(a * b for a, b in zip(vx, vy))
        norm = math.sqrt(sum(vx)) * math.sqrt(sum(vy))
        expected = dot / norm if norm else 0.0
        assert record_cosine(x, y) == pytest.approx(expected, abs=1e-12)

    @given(token_sets, token_sets)
    def test_symmetric_bounded(self, x, y):
        s = record_cosine(x, y)
        assert s == record_cosine(y, x)
        assert 0.0 <= s <= 1.0

    @given(token_sets.filter(bool))
    def test_self(self, x):
        assert record_cosine(x, x) == 1.0


def cos(a, b):
    return record_cosine(preprocess_record(a), preprocess_record(b))


class TestRecordPairOrdering:
    def test_identical_records(self):
        assert cos("c900 series", "c900 series") == 1.0

    @pytest.mark.parametrize("a,b", [("ts900", "cs900"), ("c800", "s800")])
    def test_different_prefixes_below_threshold(self, a, b):
        assert cos(a, b) < 0.4

    def test_same_series_above_prefix_change(self):
        assert cos("c2950 series", "c2916 series") > cos("ts900", "cs900")
