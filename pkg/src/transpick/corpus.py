"""Corpus loading, validation, splitting, and campaign-artifact files.

The corpus file format is JSON lines: one object per line with exactly
the fields `id` (string), `lf` (string), and `utterances` (object
mapping language code to utterance text).  Campaign outputs are
per-round selection lists (one id per line) and metrics files (one JSON
object per round).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

from .lftree import LfParseError, parse_lf
from .rng import SplitMix64


class CorpusError(ValueError):
    """Raised for malformed corpus files or invalid split parameters."""


@dataclass
class Example:
    """One utterance/LF pair; the unit of selection and translation.

    `utterances` maps language codes to text.  The source language is
    always present; target-language entries are absent until translated
    (or hidden gold, revealed by the simulation oracle).
    """

    id: str
    lf: str
    utterances: Mapping[str, str]

    def utterance(self, lang: str) -> str:
        return self.utterances[lang]

    def has_language(self, lang: str) -> bool:
        return lang in self.utterances


@dataclass
class Corpus:
    examples: list[Example]
    source_lang: str
    target_lang: str
    _by_id: dict[str, Example] = field(init=False, repr=False)

    def __post_init__(self):
        self._by_id = {}
        for ex in self.examples:
            if ex.id in self._by_id:
                raise CorpusError(f"duplicate example id {ex.id!r}")
            self._by_id[ex.id] = ex

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def ids(self) -> list[str]:
        return [ex.id for ex in self.examples]

    def by_id(self, example_id: str) -> Example:
        return self._by_id[example_id]

    def subset(self, ids) -> "Corpus":
        """New corpus with the given ids, in this corpus's order."""
        wanted = set(ids)
        return Corpus(
            [ex for ex in self.examples if ex.id in wanted],
            self.source_lang,
            self.target_lang,
        )

    def restrict_language(self, lang: str) -> "Corpus":
        """Keep only `lang` utterances; drops examples without one."""
        kept = [
            Example(ex.id, ex.lf, {lang: ex.utterances[lang]})
            for ex in self.examples
            if lang in ex.utterances
        ]
        return Corpus(kept, self.source_lang, self.target_lang)


@dataclass
class SplitSpec:
    dev_fraction: float = 0.20
    seed: int = 0


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def load_corpus(
    path: str,
    source_lang: str,
    target_lang: str,
    fmt: str = "jsonl",
) -> Corpus:
    """Load and validate a corpus file.

    Every record must carry id/lf/utterances, ids must be unique, LFs
    must parse, and the source-language utterance must be present.
    Errors name the offending line (and id where known).
    """
    if fmt != "jsonl":
        raise CorpusError(f"unsupported corpus format {fmt!r}")
    examples: list[Example] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid record: {exc}") from exc
            for fname in ("id", "lf", "utterances"):
                if fname not in record:
                    raise CorpusError(f"line {lineno}: missing required field {fname!r}")
            ex_id = record["id"]
            if not isinstance(ex_id, str) or not ex_id:
                raise CorpusError(f"line {lineno}: id must be a non-empty string")
            if ex_id in seen:
                raise CorpusError(f"line {lineno}: duplicate id {ex_id!r}")
            seen.add(ex_id)
            utterances = record["utterances"]
            if not isinstance(utterances, dict) or not all(
                isinstance(k, str) and isinstance(v, str) for k, v in utterances.items()
            ):
                raise CorpusError(f"line {lineno}: utterances must map language to text")
            if source_lang not in utterances:
                raise CorpusError(
                    f"line {lineno}: example {ex_id!r} lacks the source language {source_lang!r}"
                )
            try:
                parse_lf(record["lf"])
            except LfParseError as exc:
                raise CorpusError(
                    f"line {lineno}: example {ex_id!r} has an unparseable LF: {exc}"
                ) from exc
            examples.append(Example(ex_id, record["lf"], utterances))
    return Corpus(examples, source_lang, target_lang)


def save_corpus(corpus: Corpus, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in corpus.examples:
            record = {"id": ex.id, "lf": ex.lf, "utterances": dict(ex.utterances)}
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def split(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus]:
    """Deterministic train/dev split.

    |dev| = round-half-up(dev_fraction * N), at least 1 whenever
    dev_fraction > 0; both halves keep the corpus's original order.
    """
    n = len(corpus)
    if n == 0:
        raise CorpusError("cannot split an empty corpus")
    if not 0.0 <= spec.dev_fraction < 1.0:
        raise CorpusError("dev_fraction must be in [0, 1)")
    n_dev = round_half_up(spec.dev_fraction * n)
    if spec.dev_fraction > 0.0:
        n_dev = max(1, n_dev)
    if n_dev >= n:
        raise CorpusError("dev fraction leaves an empty training set")
    indices = list(range(n))
    SplitMix64(spec.seed).shuffle(indices)
    dev_idx = set(indices[:n_dev])
    train = [ex for i, ex in enumerate(corpus.examples) if i not in dev_idx]
    dev = [ex for i, ex in enumerate(corpus.examples) if i in dev_idx]
    return (
        Corpus(train, corpus.source_lang, corpus.target_lang),
        Corpus(dev, corpus.source_lang, corpus.target_lang),
    )


def write_selection(ids, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex_id in ids:
            fh.write(ex_id + "\n")


def read_selection(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def write_metrics(records, path: str) -> None:
    """One JSON object per round, keys sorted for byte-stable output."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def read_metrics(path: str) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records
