"""Parser adapters: the contract the selection engine trains and
queries, a self-contained surrogate implementation, and a bridge to an
external parser running as a child process.

Scores are log-probabilities (<= 0, natural log).  The surrogate is a
nearest-neighbour memorizer over utterance embeddings: cheap, fully
deterministic, and faithful enough to rank acquisition strategies.
"""
from __future__ import annotations

import json
import math
import os
import subprocess
import tempfile
import threading
from typing import Protocol

import numpy as np

from .corpus import Corpus, save_corpus
from .features import HashedTrigramEmbedder, vectors_to_csr

SCORE_EPSILON = 1e-6


class ParserAdapter(Protocol):
    def train(self, corpus: Corpus) -> None: ...

    def predict(self, utterance: str) -> str: ...

    def score(self, utterance: str, lf: str) -> float: ...

    def evaluate(self, corpus: Corpus) -> float: ...


def normalize_lf(lf: str) -> str:
    return " ".join(lf.split())


def exact_match_accuracy(predictions: list[str], golds: list[str]) -> float:
    """Fraction of whitespace-normalized exact matches."""
    if len(predictions) != len(golds):
        raise ValueError("prediction/gold length mismatch")
    if not golds:
        raise ValueError("accuracy over zero pairs is undefined")
    hits = sum(
        1 for p, g in zip(predictions, golds) if normalize_lf(p) == normalize_lf(g)
    )
    return hits / len(golds)


class SurrogateParser:
    """Memorizes training pairs and predicts the LF of the most similar
    stored utterance (cosine over hashed-trigram embeddings).

    score(x, y) = (ln(maxSim + eps) - ln(1 + eps)) / temperature where
    maxSim ranges over stored pairs annotated with y (0 when y was never
    seen), so a perfect match scores 0 and an unseen LF is heavily
    penalized but finite.  Similarity ties resolve to the
    lexicographically smaller example id.
    """

    def __init__(self, embedder: HashedTrigramEmbedder | None = None, temperature: float = 1.0):
        if temperature <= 0.0:
            raise ValueError("temperature must be positive")
        self.embedder = embedder or HashedTrigramEmbedder()
        self.temperature = temperature
        self._pairs: list[tuple[str, str]] = []  # (example id, raw lf)
        self._matrix = None
        self._lf_rows: dict[str, list[int]] = {}

    @property
    def trained(self) -> bool:
        return self._matrix is not None

    def train(self, corpus: Corpus) -> None:
        pairs = []
        vectors = []
        for ex in corpus:
            for lang in sorted(ex.utterances):
                pairs.append((ex.id, ex.lf))
                vectors.append(self.embedder.embed(ex.utterances[lang]))
        if not pairs:
            raise ValueError("cannot train on a corpus with no utterances")
        self._pairs = pairs
        self._matrix = vectors_to_csr(vectors, self.embedder.buckets)
        self._lf_rows = {}
        for row, (_, lf) in enumerate(pairs):
            self._lf_rows.setdefault(normalize_lf(lf), []).append(row)

    def _require_trained(self):
        if not self.trained:
            raise RuntimeError("parser has not been trained")

    def _sims(self, utterance: str) -> np.ndarray:
        q = vectors_to_csr([self.embedder.embed(utterance)], self.embedder.buckets)
        return np.asarray((self._matrix @ q.T).todense()).reshape(-1)

    def predict(self, utterance: str) -> str:
        self._require_trained()
        sims = self._sims(utterance)
        best = np.flatnonzero(sims == sims.max())
        row = min(best, key=lambda r: self._pairs[r][0])
        return self._pairs[row][1]

    def score(self, utterance: str, lf: str) -> float:
        self._require_trained()
        rows = self._lf_rows.get(normalize_lf(lf))
        if rows:
            sims = self._sims(utterance)
            max_sim = float(sims[rows].max())
        else:
            max_sim = 0.0
        raw = (math.log(max_sim + SCORE_EPSILON) - math.log1p(SCORE_EPSILON)) / self.temperature
        return min(0.0, raw)

    def evaluate(self, corpus: Corpus) -> float:
        self._require_trained()
        predictions = []
        golds = []
        queries = []
        for ex in corpus:
            for lang in sorted(ex.utterances):
                queries.append(ex.utterances[lang])
                golds.append(ex.lf)
        if not golds:
            raise ValueError("cannot evaluate on a corpus with no utterances")
        q = vectors_to_csr([self.embedder.embed(u) for u in queries], self.embedder.buckets)
        sims = np.asarray((self._matrix @ q.T).todense())
        for col in range(sims.shape[1]):
            column = sims[:, col]
            best = np.flatnonzero(column == column.max())
            row = min(best, key=lambda r: self._pairs[r][0])
            predictions.append(self._pairs[row][1])
        return exact_match_accuracy(predictions, golds)


class ParserBridgeError(RuntimeError):
    """The external parser replied with an error or broke the protocol."""


class ExternalParser:
    """Adapter over a line-oriented child process.

    One JSON object per line each way.  Requests carry a "cmd" field
    (train / predict / score / evaluate / shutdown); replies are either
    {"ok": true, "result": ...} or {"ok": false, "error": "..."}.
    Corpora travel by temp-file path, not inline.
    """

    def __init__(self, command: list[str]):
        if not command:
            raise ValueError("external parser command must be non-empty")
        self.command = list(command)
        self._proc: subprocess.Popen | None = None
        self._lock = threading.Lock()
        self._tempfiles: list[str] = []

    def _ensure_started(self):
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )

    def _call(self, request: dict):
        with self._lock:
            self._ensure_started()
            assert self._proc.stdin is not None and self._proc.stdout is not None
            self._proc.stdin.write(json.dumps(request) + "\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        if not line:
            raise ParserBridgeError("external parser closed its output stream")
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParserBridgeError(f"unparseable reply: {line!r}") from exc
        if not reply.get("ok"):
            raise ParserBridgeError(str(reply.get("error", "unknown external error")))
        return reply.get("result")

    def _corpus_to_path(self, corpus: Corpus) -> str:
        fd, path = tempfile.mkstemp(prefix="parser-corpus-", suffix=".jsonl")
        os.close(fd)
        save_corpus(corpus, path)
        self._tempfiles.append(path)
        return path

    def train(self, corpus: Corpus) -> None:
        self._call(
            {
                "cmd": "train",
                "corpus_path": self._corpus_to_path(corpus),
                "source_lang": corpus.source_lang,
                "target_lang": corpus.target_lang,
            }
        )

    def predict(self, utterance: str) -> str:
        return str(self._call({"cmd": "predict", "utterance": utterance}))

    def score(self, utterance: str, lf: str) -> float:
        return float(self._call({"cmd": "score", "utterance": utterance, "lf": lf}))

    def evaluate(self, corpus: Corpus) -> float:
        return float(
            self._call(
                {
                    "cmd": "evaluate",
                    "corpus_path": self._corpus_to_path(corpus),
                    "source_lang": corpus.source_lang,
                    "target_lang": corpus.target_lang,
                }
            )
        )

    def close(self):
        if self._proc is not None and self._proc.poll() is None:
            try:
                self._call({"cmd": "shutdown"})
            except ParserBridgeError:
                pass
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            self._proc.wait(timeout=10)
        for path in self._tempfiles:
            try:
                os.unlink(path)
            except OSError:
                pass
        self._tempfiles.clear()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def make_parser(spec) -> ParserAdapter:
    """Build an adapter from a config value: "surrogate" or an external
    command (list of argv strings, or a single shell-split string)."""
    if spec in (None, "surrogate"):
        return SurrogateParser()
    if isinstance(spec, str):
        return ExternalParser(spec.split())
    return ExternalParser(list(spec))
