"""Score-feature classification of field pairs.

Ground truth is multiplied by synchronized sampling (an element is kept in
both sets or in neither), each sampled pair is turned into a vector of
similarity scores, and a linear max-margin model is fitted with seeded
mini-batch subgradient descent on the hinge loss.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import AbstractSet, Mapping, Optional, Sequence, TypeVar, Union

import numpy as np

from .atomic import atomic_writer
from .base import FieldId, FieldPair
from .ingest import NumericSet
from .lsh import Hasher, LshConfig, MinHashSignature, field_shingles, hash_keys, mh_similarity, minhash_values
from .numeric import bdp_similarity, rd_similarity
from .textmatch import FieldTokenCorpus, tpm_match_ratios

BDP_BUCKETS = (
    100, 200, 500, 1000, 2000, 5000, 10000, 50000, 100000,
    500000, 1000000, 5000000, 10000000, 50000000, 100000000,
)
MR_THRESHOLDS = (0.3, 0.4, 0.5, 0.6)
NUMERIC_FEATURES = ("rds",) + tuple(f"bdp@{n}" for n in BDP_BUCKETS)
TEXT_FEATURES = tuple(f"mr@{t}" for t in MR_THRESHOLDS) + ("mhsim",)
SCHEMA_VERSION = 1

S = TypeVar("S", NumericSet, AbstractSet, FieldTokenCorpus)


@dataclass(frozen=True)
class SamplerConfig:
    rate: float = 0.5
    copies: int = 100
    seed: int = 0
    max_retries: int = 32

    def __post_init__(self) -> None:
        if not 0.0 < self.rate <= 1.0:
            raise ValueError("rate must lie in (0, 1]")
        if self.copies < 1:
            raise ValueError("copies must be >= 1")


@dataclass
class LabeledPair:
    pair: Optional[FieldPair]
    features: np.ndarray
    label: int
    copy: int = 0

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.size not in (len(NUMERIC_FEATURES), len(TEXT_FEATURES)):
            raise ValueError(f"unexpected feature length {self.features.size}")
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")


# -- synchronized sampling ----------------------------------------------------

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def _mix(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        x = x + _GOLDEN
        x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return x ^ (x >> np.uint64(31))


def element_hashes(elements: Union[np.ndarray, Sequence[str]]) -> np.ndarray:
    """Stable 64-bit hashes; floats hash by bit pattern, strings via blake2b."""
    if isinstance(elements, np.ndarray) and elements.dtype.kind == "f":
        return _mix(np.ascontiguousarray(elements, dtype=np.float64).view(np.uint64))
    return Hasher().bases(elements)


def _salt(seed: int, index: int, attempt: int) -> np.uint64:
    digest = hashlib.blake2b(f"{seed}:{index}:{attempt}".encode(), digest_size=8).digest()
    return np.uint64(int.from_bytes(digest, "little"))


def keep_mask(hashes: np.ndarray, salt: np.uint64, rate: float) -> np.ndarray:
    if rate >= 1.0:
        return np.ones(hashes.size, dtype=bool)
    u = _mix(hashes ^ salt)
    return u < np.uint64(min(int(rate * 2.0**64), 2**64 - 1))


def _members(x) -> tuple[list, np.ndarray]:
    if isinstance(x, NumericSet):
        return list(x.values), element_hashes(x.values)
    if isinstance(x, FieldTokenCorpus):
        keys = [ts.source_record for ts in x.records]
        return keys, element_hashes(keys)
    items = sorted(x)
    if items and isinstance(items[0], (float, int)):
        return items, element_hashes(np.asarray(items, dtype=np.float64))
    return items, element_hashes(items)


def _rebuild(x, items: list, mask: np.ndarray):
    if isinstance(x, NumericSet):
        return NumericSet(x.values[mask], x.source)
    if isinstance(x, FieldTokenCorpus):
        return FieldTokenCorpus(x.field, [ts for ts, k in zip(x.records, mask) if k])
    kept = (e for e, k in zip(items, mask) if k)
    return frozenset(kept) if isinstance(x, frozenset) else set(kept)


def synchronized_sample(a: S, b: S, cfg: SamplerConfig = SamplerConfig(), index: int = 0) -> tuple[S, S]:
    """Sample both sides with one element-keyed coin per element.

    Works on numeric sets, plain sets, and token corpora (records are keyed by
    their raw text). An empty side triggers a resample with the next salt.
    """
    items_a, ha = _members(a)
    items_b, hb = _members(b)
    if not items_a or not items_b:
        raise ValueError("synchronized_sample needs two non-empty sets")
    for attempt in range(cfg.max_retries):
        salt = _salt(cfg.seed, index, attempt)
        ma, mb = keep_mask(ha, salt, cfg.rate), keep_mask(hb, salt, cfg.rate)
        if ma.any() and mb.any():
            return _rebuild(a, items_a, ma), _rebuild(b, items_b, mb)
    raise RuntimeError(f"sampling left a side empty after {cfg.max_retries} retries")


# -- features -------------------------------------------------------------------


def numeric_features(a: NumericSet, b: NumericSet) -> np.ndarray:
    feats = [rd_similarity(a, b)]
    feats.extend(bdp_similarity(a, b, n) for n in BDP_BUCKETS)
    return np.array(feats)


def text_features(
    a: FieldTokenCorpus,
    b: FieldTokenCorpus,
    window: Optional[int] = 16,
    lsh: LshConfig = LshConfig(),
    hasher: Optional[Hasher] = None,
) -> np.ndarray:
    feats = tpm_match_ratios(a, b, MR_THRESHOLDS, window)
    hasher = hasher or Hasher()
    keys = hash_keys(lsh.n, lsh.seed)
    sigs = []
    for corpus in (a, b):
        sh = sorted(field_shingles(corpus, lsh.shingle_k))
        if not sh:
            raise ValueError(f"no shingles for {corpus.field}")
        sigs.append(MinHashSignature(minhash_values(hasher.bases(sh), keys), lsh.seed))
    feats.append(mh_similarity(*sigs))
    return np.array(feats)


# -- model ----------------------------------------------------------------------


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    feature_means: np.ndarray
    feature_stds: np.ndarray
    feature_names: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.feature_means = np.asarray(self.feature_means, dtype=np.float64)
        self.feature_stds = np.asarray(self.feature_stds, dtype=np.float64)
        n = self.weights.size
        if self.feature_means.size != n or self.feature_stds.size != n:
            raise ValueError("normalization vectors must match the weight length")

    def margins(self, X: np.ndarray) -> np.ndarray:
        Z = (np.atleast_2d(X) - self.feature_means) / self.feature_stds
        return Z @ self.weights + self.bias

    def save(self, path: str | Path) -> None:
        lines = [
            f"schema_version = {SCHEMA_VERSION}",
            f"feature_names = {','.join(self.feature_names)}",
            f"weights = {_fmt(self.weights)}",
            f"bias = {float(self.bias)!r}",
            f"feature_means = {_fmt(self.feature_means)}",
            f"feature_stds = {_fmt(self.feature_stds)}",
        ]
        with atomic_writer(path) as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "LinearModel":
        kv = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line.strip() and not line.startswith("#"):
                key, _, value = line.partition("=")
                kv[key.strip()] = value.strip()
        if int(kv.get("schema_version", -1)) != SCHEMA_VERSION:
            raise ValueError(f"unsupported model schema {kv.get('schema_version')}")
        names = tuple(n for n in kv.get("feature_names", "").split(",") if n)
        return cls(
            _parse(kv["weights"]), float(kv["bias"]), _parse(kv["feature_means"]), _parse(kv["feature_stds"]), names
        )


def _fmt(v: np.ndarray) -> str:
    return ",".join(repr(float(x)) for x in v)


def _parse(text: str) -> np.ndarray:
    return np.array([float(x) for x in text.split(",") if x], dtype=np.float64)


def predict(model: LinearModel, features: Sequence[float]) -> tuple[int, float]:
    """Label 1 iff the margin is strictly positive."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 1 or x.size != model.weights.size:
        raise ValueError(f"expected {model.weights.size} features, got {x.size}")
    margin = float(model.margins(x)[0])
    return int(margin > 0), margin


@dataclass(frozen=True)
class TrainConfig:
    lam: float = 1e-4
    epochs: int = 30
    batch_size: int = 32
    seed: int = 0


def fit_linear_svm(
    X: np.ndarray, y: np.ndarray, cfg: TrainConfig = TrainConfig(), names: tuple[str, ...] = ()
) -> LinearModel:
    """Mini-batch Pegasos on standardized features, returning the averaged iterate."""
    means = X.mean(axis=0)
    stds = X.std(axis=0)
    stds[stds < 1e-12] = 1.0
    Z = (X - means) / stds
    ys = np.where(y > 0, 1.0, -1.0)
    n, d = Z.shape
    rng = np.random.default_rng(cfg.seed)
    w = np.zeros(d)
    b = 0.0
    w_sum = np.zeros(d)
    b_sum = 0.0
    averaged = 0
    t = 0
    total_steps = cfg.epochs * math.ceil(n / cfg.batch_size)
    for _ in range(cfg.epochs):
        perm = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            t += 1
            idx = perm[start : start + cfg.batch_size]
            eta = 1.0 / (cfg.lam * (t + 1.0 / cfg.lam))  # damped 1/(lambda t)
            viol = ys[idx] * (Z[idx] @ w + b) < 1.0
            grad_w = cfg.lam * w - (ys[idx][viol, None] * Z[idx][viol]).sum(axis=0) / idx.size
            grad_b = -ys[idx][viol].sum() / idx.size
            w = w - eta * grad_w
            b = b - eta * grad_b
            norm = np.linalg.norm(w)
            radius = 1.0 / math.sqrt(cfg.lam)
            if norm > radius:
                w *= radius / norm
            if t > total_steps // 2:
                w_sum += w
                b_sum += b
                averaged += 1
    if averaged:
        w, b = w_sum / averaged, b_sum / averaged
    return LinearModel(w, float(b), means, stds, names)


def _accuracy(model: LinearModel, X: np.ndarray, y: np.ndarray) -> float:
    pred = (model.margins(X) > 0).astype(int)
    return float((pred == y).mean())


def _stratified_folds(y: np.ndarray, k: int, rng: np.random.Generator) -> list[np.ndarray]:
    folds: list[list[int]] = [[] for _ in range(k)]
    for label in (0, 1):
        idx = rng.permutation(np.flatnonzero(y == label))
        for i, j in enumerate(idx):
            folds[i % k].append(int(j))
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


@dataclass
class TrainReport:
    model: LinearModel
    cv_accuracy: float
    test_accuracy: float
    fold_accuracies: list[float]


def train_classifier(
    data: Sequence[LabeledPair],
    folds: int = 5,
    test_fraction: float = 0.1,
    cfg: TrainConfig = TrainConfig(),
    names: tuple[str, ...] = (),
) -> TrainReport:
    """k-fold CV inside the training split, then a held-out test score.

    The test split is stratified by label; copies synthesized from one source
    pair may land on both sides of it.
    """
    X = np.vstack([d.features for d in data])
    y = np.array([d.label for d in data], dtype=np.int64)
    if len(set(y.tolist())) < 2:
        raise ValueError("training data must contain both labels")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    if not names:
        names = NUMERIC_FEATURES if X.shape[1] == len(NUMERIC_FEATURES) else TEXT_FEATURES
    rng = np.random.default_rng(cfg.seed)
    n_test_folds = max(2, round(1 / test_fraction)) if test_fraction > 0 else 0
    if n_test_folds:
        test_idx = _stratified_folds(y, n_test_folds, rng)[0]
    else:
        test_idx = np.array([], dtype=np.int64)
    train_mask = np.ones(len(y), dtype=bool)
    train_mask[test_idx] = False
    Xtr, ytr = X[train_mask], y[train_mask]
    fold_acc = []
    cv_folds = _stratified_folds(ytr, folds, rng)
    for held in cv_folds:
        mask = np.ones(len(ytr), dtype=bool)
        mask[held] = False
        m = fit_linear_svm(Xtr[mask], ytr[mask], cfg, names)
        fold_acc.append(_accuracy(m, Xtr[held], ytr[held]))
    model = fit_linear_svm(Xtr, ytr, cfg, names)
    test_acc = _accuracy(model, X[test_idx], y[test_idx]) if test_idx.size else float("nan")
    return TrainReport(model, float(np.mean(fold_acc)), test_acc, fold_acc)


# -- training data ------------------------------------------------------------------


def synthesize_training_data(
    labeled: Sequence[tuple[FieldPair, int]],
    sources: Mapping[FieldId, S],
    cfg: SamplerConfig = SamplerConfig(),
    window: Optional[int] = 16,
    lsh: LshConfig = LshConfig(),
) -> list[LabeledPair]:
    """``cfg.copies`` synchronized samples of every labeled pair, as feature vectors.

    Sources are NumericSets (numeric features) or token corpora (text features).
    Each pair draws its samples from its own index range, so results do not
    depend on the order of ``labeled``.
    """
    hasher = Hasher()
    out = []
    for pair, label in sorted(labeled, key=lambda pl: pl[0]):
        a, b = sources[pair.a], sources[pair.b]
        base = _pair_index(pair) * cfg.copies
        for copy in range(cfg.copies):
            sa, sb = synchronized_sample(a, b, cfg, base + copy)
            if isinstance(sa, NumericSet):
                feats = numeric_features(sa, sb)
            else:
                feats = text_features(sa, sb, window, lsh, hasher)
            out.append(LabeledPair(pair, feats, label, copy))
    return out


def _pair_index(pair: FieldPair) -> int:
    digest = hashlib.blake2b(f"{pair.a}|{pair.b}".encode(), digest_size=6).digest()
    return int.from_bytes(digest, "little")


def write_training_data(data: Sequence[LabeledPair], path: str | Path, names: Sequence[str]) -> None:
    with atomic_writer(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["table_a", "field_a", "table_b", "field_b", "copy", *names, "label"])
        for d in data:
            cells = [d.pair.a.table, d.pair.a.field, d.pair.b.table, d.pair.b.field] if d.pair else ["", "", "", ""]
            w.writerow([*cells, d.copy, *(repr(float(x)) for x in d.features), d.label])


def read_training_data(path: str | Path) -> tuple[list[LabeledPair], tuple[str, ...]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        names = tuple(header[5:-1])
        out = []
        for row in reader:
            pair = None
            if row[0]:
                pair = FieldPair.of(FieldId(row[0], row[1]), FieldId(row[2], row[3]))
            out.append(LabeledPair(pair, [float(x) for x in row[5:-1]], int(row[-1]), int(row[4])))
    return out, names
