"""Translation acquisition: oracles that produce target-language
utterances for selected examples, a deterministic machine-translation
stand-in, and empirical distributions over target utterances per LF.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

from .corpus import Corpus
from .parsers import normalize_lf
from .rng import SplitMix64, derive_seed


class TranslationOracle(Protocol):
    def translate(self, example_ids: list[str], target_lang: str) -> dict[str, str]: ...


class GoldRevealOracle:
    """Simulation oracle: reveals the corpus's held-back gold target
    utterances, standing in for a human translator."""

    def __init__(self, corpus: Corpus):
        self.corpus = corpus

    def translate(self, example_ids: list[str], target_lang: str) -> dict[str, str]:
        out: dict[str, str] = {}
        for ex_id in example_ids:
            ex = self.corpus.by_id(ex_id)
            text = ex.utterances.get(target_lang)
            if not text:
                raise ValueError(
                    f"example {ex_id!r} has no gold {target_lang!r} utterance to reveal"
                )
            out[ex_id] = text
        return out


class CallbackOracle:
    """Delegates to a callable; used by services that gather
    translations from humans and by tests."""

    def __init__(self, fn: Callable[[list[str], str], dict[str, str]]):
        self.fn = fn

    def translate(self, example_ids: list[str], target_lang: str) -> dict[str, str]:
        result = self.fn(list(example_ids), target_lang)
        missing = [ex_id for ex_id in example_ids if not result.get(ex_id)]
        if missing:
            raise ValueError(f"oracle returned no utterance for {missing!r}")
        return {ex_id: result[ex_id] for ex_id in example_ids}


def load_lexicon(path: str) -> dict[str, str]:
    """Bilingual lexicon: one `source<TAB>target` pair per line."""
    lexicon: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ValueError(f"line {lineno}: expected source<TAB>target")
            lexicon[parts[0]] = parts[1]
    return lexicon


class MachineTranslator(Protocol):
    def forward(self, utterance: str) -> str: ...

    def backward(self, utterance: str) -> str: ...


class NoisyLexiconTranslator:
    """Deterministic machine-translation stand-in.

    Token-level: substitutes through an optional bilingual lexicon
    (reversed for the backward direction) and drops each token with the
    given probability, driven by a generator re-derived from the seed,
    the direction, and the utterance itself, so any utterance always
    translates the same way.  Output is never empty: if every token is
    dropped the first substituted token is kept.
    """

    def __init__(self, seed: int = 0, dropout: float = 0.1, lexicon: dict[str, str] | None = None):
        if not 0.0 <= dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        self.seed = seed
        self.dropout = dropout
        self.lexicon = dict(lexicon or {})
        self._reverse = {v: k for k, v in self.lexicon.items()}

    def _apply(self, utterance: str, table: dict[str, str], stream: str) -> str:
        tokens = utterance.split()
        if not tokens:
            raise ValueError("cannot translate an empty utterance")
        substituted = [table.get(tok, tok) for tok in tokens]
        rng = SplitMix64(derive_seed(self.seed, stream, utterance))
        kept = [tok for tok in substituted if rng.random() >= self.dropout]
        if not kept:
            kept = [substituted[0]]
        return " ".join(kept)

    def forward(self, utterance: str) -> str:
        return self._apply(utterance, self.lexicon, "fwd")

    def backward(self, utterance: str) -> str:
        return self._apply(utterance, self._reverse, "bwd")


@dataclass
class TargetDistribution:
    """P(target utterance | LF), estimated by counting distinct target
    utterances observed per (whitespace-normalized) LF."""

    rows: dict[str, dict[str, float]]

    def has_lf(self, lf: str) -> bool:
        return normalize_lf(lf) in self.rows

    def row(self, lf: str) -> dict[str, float]:
        key = normalize_lf(lf)
        if key not in self.rows:
            raise KeyError(f"no target distribution for LF {lf!r}")
        return self.rows[key]

    def nbest(self, lf: str, n: int) -> list[tuple[str, float]]:
        """Top-n utterances by probability (ties lexicographic),
        renormalized to sum to 1."""
        if n < 1:
            raise ValueError("n must be >= 1")
        row = self.row(lf)
        ranked = sorted(row.items(), key=lambda kv: (-kv[1], kv[0]))[:n]
        mass = sum(p for _, p in ranked)
        return [(utt, p / mass) for utt, p in ranked]


def fit_target_distribution(pairs: list[tuple[str, str]]) -> TargetDistribution:
    """Fit from (lf, target utterance) observations."""
    if not pairs:
        raise ValueError("cannot fit a target distribution from zero observations")
    counts: dict[str, dict[str, int]] = {}
    for lf, utt in pairs:
        if not utt:
            raise ValueError(f"empty target utterance observed for LF {lf!r}")
        row = counts.setdefault(normalize_lf(lf), {})
        row[utt] = row.get(utt, 0) + 1
    rows: dict[str, dict[str, float]] = {}
    for lf_key, row in counts.items():
        total = sum(row.values())
        rows[lf_key] = {utt: c / total for utt, c in row.items()}
    return TargetDistribution(rows)
