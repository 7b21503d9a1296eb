import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nema.base import FieldId, FieldPair
from nema.ingest import NumericSet
from nema.learn import (
    BDP_BUCKETS,
    NUMERIC_FEATURES,
    TEXT_FEATURES,
    LabeledPair,
    LinearModel,
    SamplerConfig,
    TrainConfig,
    fit_linear_svm,
    numeric_features,
    predict,
    read_training_data,
    synchronized_sample,
    synthesize_training_data,
    text_features,
    train_classifier,
    write_training_data,
)
from nema.lsh import LshConfig, field_shingles, mh_similarity, minhash_signature
from nema.numeric import bdp_similarity, rd_similarity
from nema.textmatch import FieldTokenCorpus, TextMatchConfig, tpm_match_ratio

int_sets = st.frozensets(st.integers(0, 500), min_size=1, max_size=60)


class TestSampler:
    def test_full_rate_is_identity(self):
        a, b = {1, 2, 3}, {3, 4}
        assert synchronized_sample(a, b, SamplerConfig(rate=1.0)) == (a, b)

    def test_identical_inputs_stay_identical(self):
        a = set(range(200))
        sa, sb = synchronized_sample(a, set(a), SamplerConfig(seed=4), index=7)
        assert sa == sb and 0 < len(sa) < 200

    @settings(max_examples=80)
    @given(int_sets, int_sets, st.integers(0, 10**6))
    def test_shared_elements_kept_together(self, a, b, index):
        sa, sb = synchronized_sample(a, b, SamplerConfig(seed=1), index)
        assert sa and sb
        assert sa <= a and sb <= b
        # an element is in both samples or in neither
        assert sa & b == sb & a

    def test_numeric_and_corpus_sources(self):
        na, nb = NumericSet.of(range(100)), NumericSet.of(range(50, 150))
        sa, sb = synchronized_sample(na, nb, SamplerConfig(seed=2))
        assert set(sa.values) & set(nb.values) == set(sb.values) & set(na.values)
        ca = FieldTokenCorpus.from_records([f"r{i}" for i in range(40)])
        ta, tb = synchronized_sample(ca, ca, SamplerConfig(seed=2))
        assert [t.source_record for t in ta.records] == [t.source_record for t in tb.records]

    def test_deterministic(self):
        a, b = set(range(100)), set(range(30, 130))
        cfg = SamplerConfig(seed=3)
        assert synchronized_sample(a, b, cfg, 5) == synchronized_sample(a, b, cfg, 5)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            synchronized_sample(set(), {1})

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SamplerConfig(rate=0.0)


class TestFeatures:
    def test_numeric_identical(self):
        s = NumericSet.of([3, 9, 27, 81])
        f = numeric_features(s, s)
        assert f.shape == (len(NUMERIC_FEATURES),) == (16,)
        assert np.all(f == 1.0)

    def test_numeric_components(self):
        a, b = NumericSet.of(range(0, 300, 3)), NumericSet.of(range(100, 400, 7))
        f = numeric_features(a, b)
        assert f[0] == rd_similarity(a, b)
        assert list(f[1:]) == [bdp_similarity(a, b, n) for n in BDP_BUCKETS]

    def test_text_identical(self):
        c = FieldTokenCorpus.from_records(["c900 series", "air35ce", "mem-4700m"])
        f = text_features(c, c)
        assert f.shape == (len(TEXT_FEATURES),) == (5,)
        assert np.all(f == 1.0)

    def test_text_components(self):
        a = FieldTokenCorpus.from_records(["c2950 series", "c2916 series", "ws-x6748"])
        b = FieldTokenCorpus.from_records(["c2950-24", "css2950", "ws x6748 ge"])
        cfg = LshConfig(seed=6)
        f = text_features(a, b, window=4, lsh=cfg)
        for t, got in zip((0.3, 0.4, 0.5, 0.6), f[:4]):
            assert got == tpm_match_ratio(a, b, TextMatchConfig(t_rn=t, window=4))
        sig = lambda c: minhash_signature(field_shingles(c), cfg)
        assert f[4] == mh_similarity(sig(a), sig(b))
        assert list(f[:4]) == sorted(f[:4], reverse=True)


def separable(n=40, seed=0):
    rng = np.random.default_rng(seed)
    pos = rng.normal(1.0, 0.1, size=(n, 5))
    neg = rng.normal(0.2, 0.1, size=(n, 5))
    X = np.vstack([pos, neg])
    y = np.array([1] * n + [0] * n)
    return [LabeledPair(None, x, int(label)) for x, label in zip(X, y)]


class TestModel:
    def test_separable_data_learned(self):
        report = train_classifier(separable())
        assert report.cv_accuracy == 1.0 and report.test_accuracy == 1.0
        assert len(report.fold_accuracies) == 5
        assert report.model.feature_names == TEXT_FEATURES

    def test_deterministic(self):
        data = separable(seed=1)
        one, two = train_classifier(data), train_classifier(data)
        assert np.array_equal(one.model.weights, two.model.weights)
        assert one.fold_accuracies == two.fold_accuracies

    def test_zero_margin_is_negative(self):
        m = LinearModel(np.zeros(5), 0.0, np.zeros(5), np.ones(5))
        assert predict(m, np.zeros(5)) == (0, 0.0)

    def test_predict_checks_length(self):
        m = LinearModel(np.zeros(5), 0.0, np.zeros(5), np.ones(5))
        with pytest.raises(ValueError):
            predict(m, np.zeros(16))

    def test_single_class_rejected(self):
        data = [LabeledPair(None, np.ones(5), 1) for _ in range(10)]
        with pytest.raises(ValueError):
            train_classifier(data)

    def test_constant_feature_tolerated(self):
        X = np.array([[0.0, 1.0], [1.0, 1.0], [0.1, 1.0], [0.9, 1.0]])
        y = np.array([0, 1, 0, 1])
        m = fit_linear_svm(X, y, TrainConfig(epochs=50))
        assert [predict(m, x)[0] for x in X] == [0, 1, 0, 1]

    def test_save_load_round_trip(self, tmp_path):
        model = train_classifier(separable()).model
        path = tmp_path / "model.txt"
        model.save(path)
        back = LinearModel.load(path)
        assert np.array_equal(back.weights, model.weights) and back.bias == model.bias
        assert np.array_equal(back.feature_stds, model.feature_stds)
        assert back.feature_names == model.feature_names

    def test_load_rejects_other_schema(self, tmp_path):
        path = tmp_path / "model.txt"
        path.write_text("schema_version = 99\n")
        with pytest.raises(ValueError):
            LinearModel.load(path)


class TestTrainingData:
    def test_round_trip(self, tmp_path):
        pair = FieldPair.of(FieldId("a", "x"), FieldId("b", "y"))
        sources = {pair.a: NumericSet.of(range(100)), pair.b: NumericSet.of(range(20, 120))}
        data = synthesize_training_data([(pair, 1)], sources, SamplerConfig(copies=4, seed=1))
        assert [d.copy for d in data] == [0, 1, 2, 3]
        path = tmp_path / "train.csv"
        write_training_data(data, path, NUMERIC_FEATURES)
        back, names = read_training_data(path)
        assert names == NUMERIC_FEATURES
        assert [(d.pair, d.label, d.copy) for d in back] == [(d.pair, d.label, d.copy) for d in data]
        assert all(np.array_equal(x.features, y.features) for x, y in zip(back, data))

    def test_independent_of_input_order(self):
        fields = [FieldId(t, "f") for t in "abc"]
        sources = {f: NumericSet.of(range(i * 10, i * 10 + 80)) for i, f in enumerate(fields)}
        labeled = [(FieldPair.of(fields[0], fields[1]), 1), (FieldPair.of(fields[0], fields[2]), 0)]
        cfg = SamplerConfig(copies=3, seed=2)
        one = synthesize_training_data(labeled, sources, cfg)
        two = synthesize_training_data(labeled[::-1], sources, cfg)
        assert all(np.array_equal(x.features, y.features) for x, y in zip(one, two))

    def test_bad_feature_length(self):
        with pytest.raises(ValueError):
            LabeledPair(None, np.ones(3), 1)
