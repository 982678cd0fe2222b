"""Acquisition scoring and batch selection.

Every scorer returns a map from candidate example id to a real score
where higher is better and -inf means "excluded this round".  Batch
selection is shared: rank by (score desc, id asc), optionally with
group exclusion so one batch never takes two examples from the same
cluster.
"""
from __future__ import annotations

import math

import numpy as np

from .clustering import Clustering, incremental_kmeans
from .corpus import Example
from .features import CooccurrenceModel, SparseVector, cached_units
from .numerics import NEG_INF, entropy, kde_log_density, median_pairwise_bandwidth, quantile_normalize
from .rng import SplitMix64, derive_seed
from .translation import MachineTranslator, TargetDistribution

ScoreMap = dict[str, float]


def lfsd_scores(
    untranslated: list[tuple[str, SparseVector]],
    translated: list[tuple[str, SparseVector]],
    k_new: int,
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> tuple[ScoreMap, Clustering]:
    """Low-density selection over LF feature space.

    Partitions translated+untranslated examples into len(translated) +
    k_new clusters, freezing each translated example's feature vector
    as a centroid.  An untranslated example scores the negated squared
    distance to its centroid, or -inf when its cluster already holds a
    translated example.  The clustering is returned so callers can also
    exclude clusters within the batch being assembled.
    """
    points = list(translated) + list(untranslated)
    clustering = incremental_kmeans(
        points,
        [vec for _, vec in translated],
        k_new,
        seed=seed,
        max_iter=max_iter,
        tol=tol,
    )
    excluded = {clustering.assignment[ex_id] for ex_id, _ in translated}
    scores: ScoreMap = {}
    for ex_id, _ in untranslated:
        cluster = clustering.assignment[ex_id]
        if cluster in excluded:
            scores[ex_id] = NEG_INF
        else:
            scores[ex_id] = -clustering.sq_dist[ex_id]
    return scores, clustering


def lcd_scores(
    candidates: list[Example],
    cooc: CooccurrenceModel,
    selected_units: set[str],
    beta: float,
    unit: str = "both",
) -> ScoreMap:
    """Lexically-diverse selection: mean co-occurrence entropy of the
    example's LF units, with units already covered by earlier
    selections discounted by beta."""
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must be in [0, 1)")
    scores: ScoreMap = {}
    for ex in candidates:
        units = set(cached_units(ex.lf, unit))
        if not units:
            raise ValueError(f"example {ex.id!r} yields no units for unit={unit!r}")
        acc = 0.0
        for u in sorted(units):  # fixed order keeps the sum reproducible
            weight = beta if u in selected_units else 1.0
            acc += weight * cooc.row_entropy(u)
        scores[ex.id] = acc / len(units)
    return scores


def combine_lfs_lc_d(lfsd: ScoreMap, lcd: ScoreMap, alpha: float) -> ScoreMap:
    """Quantile-normalize both components onto a shared scale, then
    alpha * lfsd + lcd.  -inf in the lfsd component is preserved."""
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    if set(lfsd) != set(lcd):
        raise ValueError("component score maps must cover the same ids")
    norm_s, norm_c = quantile_normalize([lfsd, lcd])
    combined: ScoreMap = {}
    for ex_id in lfsd:
        if lfsd[ex_id] == NEG_INF or lcd[ex_id] == NEG_INF:
            combined[ex_id] = NEG_INF
        else:
            combined[ex_id] = alpha * norm_s[ex_id] + norm_c[ex_id]
    return combined


def bias_scores(
    tdist: TargetDistribution,
    candidates: list[Example],
    variant: str = "nbest",
    n_best: int = 5,
) -> ScoreMap:
    """Translation-bias estimate per candidate LF.

    nbest: negated entropy of the renormalized top-n target
    distribution (peaked rows score near 0, flat rows lower).
    max: log of the single most probable target utterance.
    """
    scores: ScoreMap = {}
    for ex in candidates:
        if variant == "nbest":
            probs = [p for _, p in tdist.nbest(ex.lf, n_best)]
            scores[ex.id] = -entropy(probs)
        elif variant == "max":
            scores[ex.id] = math.log(max(tdist.row(ex.lf).values()))
        else:
            raise ValueError(f"unknown bias variant {variant!r}")
    return scores


def error_scores(
    tdist: TargetDistribution,
    translator: MachineTranslator,
    parser,
    candidates: list[Example],
    source_lang: str,
    variant: str = "nbest",
    n_best: int = 5,
    backtranslate_max: bool = False,
) -> ScoreMap:
    """Expected back-translation parse loss per candidate.

    nbest: sum over the renormalized top-n target utterances of
    p * (-log parser score of the back-translated utterance).
    max: negated parser log-score of the source utterance itself (or of
    its forward/backward round trip when backtranslate_max is set).
    """
    scores: ScoreMap = {}
    for ex in candidates:
        if variant == "nbest":
            acc = 0.0
            for utt, p in tdist.nbest(ex.lf, n_best):
                acc += p * -parser.score(translator.backward(utt), ex.lf)
            scores[ex.id] = acc
        elif variant == "max":
            source = ex.utterances[source_lang]
            probe = translator.backward(translator.forward(source)) if backtranslate_max else source
            scores[ex.id] = -parser.score(probe, ex.lf)
        else:
            raise ValueError(f"unknown error variant {variant!r}")
    return scores


def _compact_dense(vectors: list[SparseVector]) -> np.ndarray:
    dims = sorted({d for vec in vectors for d in vec.entries}) or [0]
    index = {d: i for i, d in enumerate(dims)}
    X = np.zeros((len(vectors), len(dims)))
    for row, vec in enumerate(vectors):
        for d, w in vec.entries.items():
            X[row, index[d]] = w
    return X


def density_scores(
    candidates: list[tuple[str, SparseVector]],
    data: list[SparseVector],
    bandwidth: float | None = None,
    seed: int = 0,
) -> ScoreMap:
    """Log KDE density of each candidate's utterance embedding under
    the pool's embedding cloud.  Bandwidth defaults to the median
    pairwise distance of a seeded subsample of the pool."""
    if not data:
        raise ValueError("density needs a non-empty data pool")
    stacked = _compact_dense([vec for _, vec in candidates] + list(data))
    Q = stacked[: len(candidates)]
    X = stacked[len(candidates) :]
    if bandwidth is None:
        bandwidth = median_pairwise_bandwidth(X, seed=seed)
    return {
        ex_id: kde_log_density(X, Q[i], bandwidth)
        for i, (ex_id, _) in enumerate(candidates)
    }


def semdiv_scores(
    clustering: Clustering, candidate_ids: list[str], selected_ids: list[str]
) -> ScoreMap:
    """0 for candidates whose utterance cluster holds no previously
    selected example, -inf otherwise."""
    occupied = {clustering.assignment[ex_id] for ex_id in selected_ids}
    scores: ScoreMap = {}
    for ex_id in candidate_ids:
        cluster = clustering.assignment[ex_id]
        scores[ex_id] = NEG_INF if cluster in occupied else 0.0
    return scores


def amsp_aggregate(components: dict[str, ScoreMap], coefficients: dict[str, float]) -> ScoreMap:
    """Weighted sum of quantile-normalized component scores.

    Component and coefficient names must match exactly; an example with
    -inf in any component aggregates to -inf regardless of weights.
    """
    if not components:
        raise ValueError("need at least one component")
    if set(components) != set(coefficients):
        raise ValueError("coefficient names must match component names")
    for name, coeff in coefficients.items():
        if coeff < 0.0:
            raise ValueError(f"coefficient for {name!r} must be >= 0")
    names = sorted(components)
    ids = set(components[names[0]])
    for name in names[1:]:
        if set(components[name]) != ids:
            raise ValueError("component score maps must cover the same ids")
    normalized = dict(zip(names, quantile_normalize([components[n] for n in names])))
    out: ScoreMap = {}
    for ex_id in ids:
        if any(components[n][ex_id] == NEG_INF for n in names):
            out[ex_id] = NEG_INF
        else:
            out[ex_id] = sum(coefficients[n] * normalized[n][ex_id] for n in names)
    return out


def random_scores(ids, seed: int = 0) -> ScoreMap:
    """Seeded uniform scores, drawn in sorted-id order so the ranking
    depends only on the id set and the seed."""
    rng = SplitMix64(derive_seed(seed, "random-baseline"))
    return {ex_id: rng.random() for ex_id in sorted(ids)}


def s2s_fw_scores(parser, candidates: list[Example], source_lang: str) -> ScoreMap:
    """Least-confidence baseline: negated parser log-score of the gold
    source pair, so the least confidently parsed examples rank first."""
    return {
        ex.id: -parser.score(ex.utterances[source_lang], ex.lf) for ex in candidates
    }


def select_batch(scores: ScoreMap, k: int) -> list[str]:
    """Top-k finite-scored ids by (score desc, id asc)."""
    if k < 1:
        raise ValueError("batch size must be >= 1")
    finite = [(ex_id, s) for ex_id, s in scores.items() if s != NEG_INF]
    if len(finite) < k:
        raise ValueError(f"only {len(finite)} finite-scored candidates for a batch of {k}")
    finite.sort(key=lambda t: (-t[1], t[0]))
    return [ex_id for ex_id, _ in finite[:k]]


def select_with_exclusion(scores: ScoreMap, k: int, groups: dict[str, int]) -> list[str]:
    """Greedy top-k that never takes two examples from one group.

    Ungrouped ids (absent from `groups`) are always eligible.
    """
    if k < 1:
        raise ValueError("batch size must be >= 1")
    finite = [(ex_id, s) for ex_id, s in scores.items() if s != NEG_INF]
    finite.sort(key=lambda t: (-t[1], t[0]))
    chosen: list[str] = []
    taken: set[int] = set()
    for ex_id, _ in finite:
        group = groups.get(ex_id)
        if group is not None and group in taken:
            continue
        chosen.append(ex_id)
        if group is not None:
            taken.add(group)
        if len(chosen) == k:
            return chosen
    raise ValueError(
        f"only {len(chosen)} eligible candidates for a batch of {k} under group exclusion"
    )


def select_max_compound(
    candidates: list[Example], covered: set[str], k: int, unit: str = "both"
) -> list[str]:
    """Greedy coverage baseline: repeatedly take the candidate that adds
    the most not-yet-covered unit types, ties to the smaller id."""
    if k < 1:
        raise ValueError("batch size must be >= 1")
    if len(candidates) < k:
        raise ValueError(f"only {len(candidates)} candidates for a batch of {k}")
    unit_sets = {ex.id: set(cached_units(ex.lf, unit)) for ex in candidates}
    covered = set(covered)
    remaining = sorted(unit_sets)
    chosen: list[str] = []
    for _ in range(k):
        best_id = min(remaining, key=lambda ex_id: (-len(unit_sets[ex_id] - covered), ex_id))
        chosen.append(best_id)
        covered |= unit_sets[best_id]
        remaining.remove(best_id)
    return chosen
