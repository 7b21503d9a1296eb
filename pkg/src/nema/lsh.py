"""MinHash signatures over field shingles, and LSH banding for candidate pairs.

Naming follows the banding formula ``P = 1 - (1 - s**b)**r``: ``band_size``
(b) is the number of signature values per sketch and ``num_bands`` (r) the
number of sketches.
"""

from __future__ import annotations

import hashlib
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .base import FieldId, FieldPair, ScoredPair, assign_ranks
from .textmatch import FieldTokenCorpus

PAD = "$"
_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


@dataclass(frozen=True)
class LshConfig:
    band_size: int = 2
    num_bands: int = 128
    seed: int = 1
    shingle_k: int = 3

    def __post_init__(self) -> None:
        if self.band_size < 1 or self.num_bands < 1 or self.shingle_k < 1:
            raise ValueError("band_size, num_bands and shingle_k must be positive")

    @property
    def n(self) -> int:
        return self.band_size * self.num_bands


@dataclass(frozen=True)
class MinHashSignature:
    values: np.ndarray  # uint64, length n
    seed: int

    @property
    def n(self) -> int:
        return int(self.values.size)


def shingles_of(token: str, k: int = 3) -> set[str]:
    if len(token) < k:
        return {token + PAD * (k - len(token))}
    return {token[i : i + k] for i in range(len(token) - k + 1)}


def field_shingles(corpus: FieldTokenCorpus | Iterable[str], k: int = 3) -> frozenset[str]:
    """Union of k-shingles over every token of every record."""
    if isinstance(corpus, FieldTokenCorpus):
        tokens: set[str] = set().union(*(ts.tokens for ts in corpus.distinct))
    else:
        tokens = set(corpus)
    out = {t[i : i + k] for t in tokens for i in range(len(t) - k + 1)}
    out.update(t + PAD * (k - len(t)) for t in tokens if len(t) < k)
    return frozenset(out)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = x + np.uint64(0x9E3779B97F4A7C15)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def base_hash(item: str) -> int:
    return int.from_bytes(hashlib.blake2b(item.encode("utf-8"), digest_size=8).digest(), "little")


def hash_keys(n: int, seed: int) -> np.ndarray:
    """Per-function keys for the seeded hash family h_j(x) = mix(base(x) ^ key_j)."""
    with np.errstate(over="ignore"):
        start = _splitmix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))[0]
        return _splitmix64(start + np.arange(n, dtype=np.uint64))


class Hasher:
    """Caches base hashes of items so repeated shingles are hashed once."""

    def __init__(self) -> None:
        self._cache: dict[str, int] = {}

    def bases(self, items: Iterable[str]) -> np.ndarray:
        cache = self._cache
        out = []
        for s in items:
            h = cache.get(s)
            if h is None:
                h = cache[s] = base_hash(s)
            out.append(h)
        return np.array(out, dtype=np.uint64)


def minhash_values(bases: np.ndarray, keys: np.ndarray, chunk: int = 4096) -> np.ndarray:
    sig = np.full(keys.size, _MASK64, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for start in range(0, bases.size, chunk):
            block = _splitmix64(bases[start : start + chunk, None] ^ keys[None, :])
            np.minimum(sig, block.min(axis=0), out=sig)
    return sig


def minhash_signature(
    s: Iterable[str], cfg: LshConfig = LshConfig(), hasher: Optional[Hasher] = None
) -> MinHashSignature:
    items = sorted(s)
    if not items:
        raise ValueError("cannot sign an empty shingle set")
    bases = (hasher or Hasher()).bases(items)
    return MinHashSignature(minhash_values(bases, hash_keys(cfg.n, cfg.seed)), cfg.seed)


def mh_similarity(sa: MinHashSignature, sb: MinHashSignature) -> float:
    if sa.n != sb.n or sa.seed != sb.seed:
        raise ValueError("signatures differ in length or seed")
    return float(np.count_nonzero(sa.values == sb.values)) / sa.n


def lsh_threshold(cfg: LshConfig) -> float:
    """The selection threshold (1/b)^(1/r), in the band_size/num_bands naming."""
    return (1.0 / cfg.band_size) ** (1.0 / cfg.num_bands)


def candidate_probability(s: float, cfg: LshConfig) -> float:
    return 1.0 - (1.0 - s**cfg.band_size) ** cfg.num_bands


def lsh_candidates(
    signatures: Mapping[FieldId, MinHashSignature],
    cfg: LshConfig = LshConfig(),
    cross_table: bool = True,
) -> list[FieldPair]:
    """Fields colliding in at least one sketch, keyed by (sketch index, sketch bytes)."""
    buckets: dict[tuple[int, bytes], list[FieldId]] = defaultdict(list)
    for fid in sorted(signatures):
        sig = signatures[fid]
        if sig.n != cfg.n or sig.seed != cfg.seed:
            raise ValueError(f"signature of {fid} does not match the LSH configuration")
        sketches = sig.values.reshape(cfg.num_bands, cfg.band_size)
        for band in range(cfg.num_bands):
            buckets[(band, sketches[band].tobytes())].append(fid)
    found: set[tuple[FieldId, FieldId]] = set()
    for members in buckets.values():
        if len(members) < 2:
            continue
        # members are already sorted, so (x, y) is canonical
        for i, x in enumerate(members):
            for y in members[i + 1 :]:
                if not (cross_table and x.table == y.table):
                    found.add((x, y))
    return [FieldPair(x, y) for x, y in sorted(found)]


def sign_fields(
    corpora: Mapping[FieldId, FieldTokenCorpus], cfg: LshConfig = LshConfig()
) -> tuple[dict[FieldId, MinHashSignature], list[FieldId]]:
    """Signatures for every field with a non-empty shingle set, plus the empty ones."""
    hasher = Hasher()
    keys = hash_keys(cfg.n, cfg.seed)
    sigs, empty = {}, []
    for fid in sorted(corpora):
        sh = field_shingles(corpora[fid], cfg.shingle_k)
        if not sh:
            empty.append(fid)
            continue
        sigs[fid] = MinHashSignature(minhash_values(hasher.bases(sorted(sh)), keys), cfg.seed)
    return sigs, empty


def lsh_pipeline(
    corpora: Mapping[FieldId, FieldTokenCorpus],
    cfg: LshConfig = LshConfig(),
    top_k: Optional[int] = None,
    threshold: float = 0.1,
    pairs: Optional[Sequence[FieldPair]] = None,
) -> list[ScoredPair]:
    """Sign, band, score candidates by MinHash similarity, rank.

    ``pairs`` restricts output to the given pairs; those that are not LSH
    candidates are appended unscored. ``top_k`` truncates the ranked list.
    """
    sigs, empty = sign_fields(corpora, cfg)
    candidates = lsh_candidates(sigs, cfg)
    if pairs is not None:
        wanted = set(pairs)
        candidates = [p for p in candidates if p in wanted]
    ranked = []
    for p in candidates:
        s = mh_similarity(sigs[p.a], sigs[p.b])
        ranked.append(ScoredPair(p, {"mhsim": s}, metric="mhsim", matched=s >= threshold))
    assign_ranks(ranked)
    if top_k is not None:
        ranked = ranked[:top_k]
    if pairs is None:
        return ranked
    found = {sp.pair for sp in ranked}
    empty_set = set(empty)
    rest = [
        ScoredPair(p, metric="mhsim", note="empty" if {p.a, p.b} & empty_set else "not-candidate")
        for p in sorted(wanted - found)
    ]
    return ranked + rest
