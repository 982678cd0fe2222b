"""Seeded synthetic corpora for end-to-end exercises.

Generates template-structured LFs over a shared entity inventory with a
few source paraphrase patterns per template, plus deterministic gold
"translations" (digit-encoded tokens, reversed word order) so campaigns
can run closed-loop without external data or real translators.
"""
from __future__ import annotations

from .corpus import Corpus, Example
from .rng import SplitMix64, derive_seed

_ONSETS = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"]
_VOWELS = ["a", "e", "i", "o", "u"]

# tokens used by the utterance patterns; pseudo-words must avoid them
_RESERVED = {"which", "today", "every", "that", "show", "me"}


def _pseudo_word(rng: SplitMix64, syllables: int) -> str:
    return "".join(
        _ONSETS[rng.randrange(len(_ONSETS))] + _VOWELS[rng.randrange(len(_VOWELS))]
        for _ in range(syllables)
    )


def _word_bank(rng: SplitMix64, count: int, syllables: int, used: set[str]) -> list[str]:
    words = []
    while len(words) < count:
        w = _pseudo_word(rng, syllables)
        if w in used:
            continue
        used.add(w)
        words.append(w)
    return words


_CHAR_CODES = {chr(c): f"{c - ord('a') + 1:02d}" for c in range(ord("a"), ord("z") + 1)}


def translate_utterance(utterance: str) -> str:
    """The generator's gold translation: encode each letter as its
    two-digit alphabet position and reverse the token order.  Digit
    tokens share no character n-grams with the letter-only source text,
    so the two languages look completely unrelated to a string model.
    """
    return " ".join(
        "".join(_CHAR_CODES.get(ch, ch) for ch in tok) for tok in reversed(utterance.split())
    )


_AGGREGATES = ["count", "argmax", "sum"]


def _lf_for(agg: str, rel: str, kind: str, entity: str) -> str:
    # one skeleton for every template: the unit count is constant and the
    # shared heads are symmetric, so no template is structurally favored
    return f"( answer ( {agg} ( {rel} ( entity {entity} ) ( class {kind} ) ) ) )"


def _utterance_for(pattern: int, noun: str, verb: str, entity: str) -> str:
    # every pattern is 5 tokens with 2 pattern-specific function words, so
    # no wording is statistically privileged over another
    if pattern == 0:
        return f"which {noun} {verb} {entity} today"
    if pattern == 1:
        return f"every {noun} that {verb} {entity}"
    return f"show me {noun} {verb} {entity}"


def generate_corpus(
    n_templates: int = 30,
    per_template: int = 20,
    n_paraphrases: int = 3,
    n_entities: int = 20,
    seed: int = 0,
    source_lang: str = "en",
    target_lang: str = "de",
) -> Corpus:
    """Build n_templates * per_template examples.

    Template i owns unique relation/property predicates (so its LF
    compounds are unique to it) and its own utterance wording; each of
    its examples embeds a different entity atom, cycling through
    n_paraphrases source patterns.  Everything is a pure function of
    the arguments.
    """
    if n_templates < 1 or per_template < 1:
        raise ValueError("need at least one template and one example per template")
    if not 1 <= n_paraphrases <= 3:
        raise ValueError("between 1 and 3 paraphrase patterns are supported")
    if n_entities < per_template:
        raise ValueError("need at least as many entities as examples per template")
    rng = SplitMix64(derive_seed(seed, "corpus-words"))
    used: set[str] = set(_RESERVED)
    entities = _word_bank(rng, n_entities, 3, used)
    rels = _word_bank(rng, n_templates, 2, used)
    kinds = _word_bank(rng, n_templates, 2, used)
    nouns = _word_bank(rng, n_templates, 2, used)
    verbs = _word_bank(rng, n_templates, 2, used)

    examples = []
    index = 0
    for t in range(n_templates):
        agg = _AGGREGATES[t % len(_AGGREGATES)]
        for j in range(per_template):
            entity_index = (t * 7 + j) % n_entities
            entity = entities[entity_index]
            lf = _lf_for(agg, rels[t], kinds[t], entity)
            # pattern follows the entity so co-occurrence statistics stay
            # symmetric across templates and entities
            source = _utterance_for(entity_index % n_paraphrases, nouns[t], verbs[t], entity)
            examples.append(
                Example(
                    f"ex{index:04d}",
                    lf,
                    {source_lang: source, target_lang: translate_utterance(source)},
                )
            )
            index += 1
    return Corpus(examples, source_lang, target_lang)
