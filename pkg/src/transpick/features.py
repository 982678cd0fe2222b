"""Feature extraction: LF TF-IDF vectors, unit/token co-occurrence
statistics, and utterance embeddings.

All vectors are sparse maps from integer feature id to a non-zero
weight.  Feature ids come from a model-owned vocabulary (TF-IDF) or
from a fixed hash space (embeddings), so vectors from different models
must not be mixed.
"""
from __future__ import annotations

import math
import string
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import sparse as sp

from .lftree import lf_units, parse_lf
from .rng import fnv1a64


@lru_cache(maxsize=None)
def parse_lf_cached(lf: str):
    return parse_lf(lf)


@lru_cache(maxsize=None)
def cached_units(lf: str, unit: str) -> tuple[str, ...]:
    return tuple(lf_units(parse_lf_cached(lf), unit))


class SparseVector:
    """Immutable-by-convention sparse feature vector."""

    __slots__ = ("entries",)

    def __init__(self, entries: dict[int, float]):
        self.entries = {i: w for i, w in entries.items() if w != 0.0}

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, SparseVector) and self.entries == other.entries

    def __repr__(self) -> str:
        return f"SparseVector({self.entries!r})"

    def dot(self, other: "SparseVector") -> float:
        a, b = self.entries, other.entries
        if len(b) < len(a):
            a, b = b, a
        return sum(w * b[i] for i, w in a.items() if i in b)

    def norm_sq(self) -> float:
        return sum(w * w for w in self.entries.values())

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def sq_distance(self, other: "SparseVector") -> float:
        keys = set(self.entries) | set(other.entries)
        return sum(
            (self.entries.get(i, 0.0) - other.entries.get(i, 0.0)) ** 2 for i in keys
        )

    def scaled(self, factor: float) -> "SparseVector":
        return SparseVector({i: w * factor for i, w in self.entries.items()})


def vectors_to_csr(vectors: list[SparseVector], n_cols: int) -> sp.csr_matrix:
    """Stack sparse vectors into a CSR matrix for batched products."""
    data, indices, indptr = [], [], [0]
    for vec in vectors:
        for i in sorted(vec.entries):
            indices.append(i)
            data.append(vec.entries[i])
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int64), np.array(indptr, dtype=np.int64)),
        shape=(len(vectors), n_cols),
    )


@dataclass
class TfidfModel:
    """TF-IDF weights over LF units (atoms and/or compounds).

    tf is the raw unit count in one LF; idf = ln(N / df) over the
    fitting corpus.  A unit present in every document gets idf 0 and
    therefore never appears in transformed vectors; units unseen at fit
    time are dropped at transform time.
    """

    vocabulary: dict[str, int]
    idf: dict[int, float]
    doc_count: int
    unit: str = "both"

    def featurize(self, lf: str) -> SparseVector:
        counts: dict[int, int] = {}
        for u in cached_units(lf, self.unit):
            fid = self.vocabulary.get(u)
            if fid is not None:
                counts[fid] = counts.get(fid, 0) + 1
        return SparseVector(
            {fid: tf * self.idf[fid] for fid, tf in counts.items() if self.idf[fid] != 0.0}
        )


def fit_tfidf(examples, unit: str = "both") -> TfidfModel:
    """Fit vocabulary and idf over the examples' LFs.

    Vocabulary ids are assigned in sorted unit order so the mapping is
    a pure function of the distinct-unit set.
    """
    examples = list(examples)
    if not examples:
        raise ValueError("cannot fit tf-idf on an empty example list")
    df: dict[str, int] = {}
    for ex in examples:
        for u in set(cached_units(ex.lf, unit)):
            df[u] = df.get(u, 0) + 1
    vocabulary = {u: i for i, u in enumerate(sorted(df))}
    n = len(examples)
    idf = {vocabulary[u]: math.log(n / df[u]) for u in vocabulary}
    return TfidfModel(vocabulary, idf, n, unit)


def featurize_lf(model: TfidfModel, lf: str) -> SparseVector:
    return model.featurize(lf)


_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def tokenize_utterance(text: str) -> list[str]:
    """Lowercased whitespace tokens with surrounding punctuation removed."""
    tokens = []
    for raw in text.lower().split():
        tok = raw.translate(_PUNCT_TABLE)
        if tok:
            tokens.append(tok)
    return tokens


@dataclass
class CooccurrenceModel:
    """Per-unit distributions over co-occurring source tokens.

    Row a is built from raw co-presence counts: for every fitting
    example whose LF contains unit a, each distinct token of its source
    utterance contributes one count.  Rows are normalized on demand.
    """

    counts: dict[str, dict[str, int]]
    totals: dict[str, int]
    unit: str = "both"
    _entropy_cache: dict[str, float] = field(default_factory=dict, repr=False)

    def has_unit(self, u: str) -> bool:
        return self.totals.get(u, 0) > 0

    def row(self, u: str) -> dict[str, float]:
        total = self.totals.get(u, 0)
        if total == 0:
            raise KeyError(f"unit {u!r} has no co-occurrence row")
        return {tok: c / total for tok, c in self.counts[u].items()}

    def row_entropy(self, u: str) -> float:
        """H of the row distribution in nats; 0.0 for unknown units."""
        if u in self._entropy_cache:
            return self._entropy_cache[u]
        total = self.totals.get(u, 0)
        if total == 0:
            h = 0.0
        else:
            h = 0.0
            for c in self.counts[u].values():
                p = c / total
                h -= p * math.log(p)
            h = max(h, 0.0)
        self._entropy_cache[u] = h
        return h


def fit_cooccurrence(examples, source_lang: str, unit: str = "both") -> CooccurrenceModel:
    counts: dict[str, dict[str, int]] = {}
    totals: dict[str, int] = {}
    for ex in examples:
        # sorted iteration keeps row construction (and therefore float
        # summation order downstream) independent of string hashing
        tokens = sorted(set(tokenize_utterance(ex.utterances[source_lang])))
        if not tokens:
            continue
        for u in sorted(set(cached_units(ex.lf, unit))):
            row = counts.setdefault(u, {})
            for tok in tokens:
                row[tok] = row.get(tok, 0) + 1
            totals[u] = totals.get(u, 0) + len(tokens)
    return CooccurrenceModel(counts, totals, unit)


EMBED_BUCKETS = 1 << 16


class HashedTrigramEmbedder:
    """Deterministic hashed character-trigram utterance embeddings.

    Tokens are lowercased whitespace splits padded with "^^" and "$$";
    each trigram is hashed (FNV-1a, 64-bit) into one of 2^16 buckets and
    the bucket-count vector is L2-normalized.
    """

    def __init__(self, n: int = 3, buckets: int = EMBED_BUCKETS):
        if n < 1:
            raise ValueError("n-gram order must be >= 1")
        self.n = n
        self.buckets = buckets
        self._cache: dict[str, SparseVector] = {}

    def embed(self, text: str) -> SparseVector:
        hit = self._cache.get(text)
        if hit is not None:
            return hit
        tokens = text.lower().split()
        if not tokens:
            raise ValueError("cannot embed an empty utterance")
        counts: dict[int, float] = {}
        pad = self.n - 1
        for tok in tokens:
            padded = "^" * pad + tok + "$" * pad
            for i in range(len(padded) - self.n + 1):
                bucket = fnv1a64(padded[i : i + self.n]) % self.buckets
                counts[bucket] = counts.get(bucket, 0.0) + 1.0
        norm = math.sqrt(sum(c * c for c in counts.values()))
        vec = SparseVector({b: c / norm for b, c in counts.items()})
        self._cache[text] = vec
        return vec

    def embed_example(self, example_id: str, text: str) -> SparseVector:
        return self.embed(text)


class PrecomputedEmbedder:
    """Embeddings read from a file of `id<TAB>v1 v2 ...` lines.

    Lets campaigns swap in externally computed utterance vectors; lookup
    is by example id and a missing id is an error.
    """

    def __init__(self, path: str):
        self.vectors: dict[str, SparseVector] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ValueError(f"line {lineno}: expected id<TAB>values")
                ex_id, values = parts
                try:
                    floats = [float(v) for v in values.split()]
                except ValueError as exc:
                    raise ValueError(f"line {lineno}: bad vector value: {exc}") from exc
                if not floats:
                    raise ValueError(f"line {lineno}: empty vector")
                self.vectors[ex_id] = SparseVector(dict(enumerate(floats)))

    def embed_example(self, example_id: str, text: str) -> SparseVector:
        try:
            return self.vectors[example_id]
        except KeyError:
            raise KeyError(f"no precomputed embedding for example {example_id!r}") from None


_default_embedder = HashedTrigramEmbedder()


def embed_utterance(text: str) -> SparseVector:
    """Embed with the shared default hashed-trigram embedder."""
    return _default_embedder.embed(text)
