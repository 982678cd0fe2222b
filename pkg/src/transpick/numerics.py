"""Shared numeric primitives: entropy, cross-score quantile
normalization, and kernel density estimates.

Scores throughout the package are natural-log quantities.  -inf is a
legal score meaning "excluded"; the helpers here pass it through rather
than folding it into any statistic.
"""
from __future__ import annotations

import math

import numpy as np

from .rng import SplitMix64

NEG_INF = float("-inf")


def entropy(probs) -> float:
    """Shannon entropy in nats; 0*ln(0) is taken as 0.

    The input must be a distribution: non-negative and summing to 1
    within 1e-9.
    """
    p = np.asarray(list(probs), dtype=np.float64)
    if p.size == 0:
        raise ValueError("entropy of an empty distribution is undefined")
    if np.any(p < 0.0):
        raise ValueError("probabilities must be non-negative")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probabilities sum to {total!r}, not 1")
    nz = p[p > 0.0]
    return float(-(nz * np.log(nz)).sum())


def _quantile_curve(sorted_vals: np.ndarray, q: float) -> float:
    """Linear-interpolation quantile of a sorted sample, q in [0, 1]."""
    n = sorted_vals.size
    if n == 1:
        return float(sorted_vals[0])
    pos = q * (n - 1)
    lo = int(math.floor(pos))
    hi = min(lo + 1, n - 1)
    frac = pos - lo
    return float(sorted_vals[lo] * (1.0 - frac) + sorted_vals[hi] * frac)


def quantile_normalize(score_maps: list[dict[str, float]]) -> list[dict[str, float]]:
    """Map each score vector onto the shared reference distribution.

    The reference is the element-wise mean of the sorted finite values
    (per-vector quantile curves are interpolated when the vectors have
    different finite counts).  A value is replaced by the reference
    value at its rank; tied values all receive the mean of their tied
    reference values.  -inf entries are excluded from ranking and pass
    through unchanged.  With a single vector the transform is the
    identity on its finite entries.
    """
    if not score_maps:
        return []
    ids = set(score_maps[0])
    for sm in score_maps[1:]:
        if set(sm) != ids:
            raise ValueError("score vectors must cover the same example ids")
    finite_sorted: list[np.ndarray] = []
    for sm in score_maps:
        vals = np.sort(np.array([v for v in sm.values() if v != NEG_INF], dtype=np.float64))
        if vals.size and not np.all(np.isfinite(vals)):
            raise ValueError("scores must be finite or -inf")
        finite_sorted.append(vals)
    m = max((vals.size for vals in finite_sorted), default=0)
    if m == 0:
        return [dict(sm) for sm in score_maps]

    grid = [j / (m - 1) if m > 1 else 0.5 for j in range(m)]
    contributing = [vals for vals in finite_sorted if vals.size > 0]
    reference = np.array(
        [sum(_quantile_curve(vals, q) for vals in contributing) / len(contributing) for q in grid],
        dtype=np.float64,
    )

    def ref_at_rank(rank: int, n: int) -> float:
        if n == m:
            return float(reference[rank])
        q = rank / (n - 1) if n > 1 else 0.5
        return _quantile_curve(reference, q)

    out: list[dict[str, float]] = []
    for sm in score_maps:
        finite_items = sorted(
            ((v, k) for k, v in sm.items() if v != NEG_INF), key=lambda t: (t[0], t[1])
        )
        n = len(finite_items)
        mapped = dict(sm)
        i = 0
        while i < n:
            j = i
            while j < n and finite_items[j][0] == finite_items[i][0]:
                j += 1
            tied_mean = sum(ref_at_rank(r, n) for r in range(i, j)) / (j - i)
            for r in range(i, j):
                mapped[finite_items[r][1]] = tied_mean
            i = j
        out.append(mapped)
    return out


def kde_log_density(data: np.ndarray, query: np.ndarray, bandwidth: float) -> float:
    """ln[(1/N) * sum_i exp(-||query - x_i|| / h)].

    Unnormalized exponential kernel over Euclidean distance; a query
    coinciding with a lone data point scores ln(1) = 0.
    """
    if bandwidth <= 0.0:
        raise ValueError("bandwidth must be positive")
    pts = np.atleast_2d(np.asarray(data, dtype=np.float64))
    if pts.shape[0] == 0:
        raise ValueError("kde needs at least one data point")
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    if q.shape[0] != pts.shape[1]:
        raise ValueError("query dimension does not match the data")
    dists = np.sqrt(((pts - q[None, :]) ** 2).sum(axis=1))
    z = -dists / bandwidth
    zmax = float(z.max())
    return zmax + float(np.log(np.exp(z - zmax).sum())) - math.log(pts.shape[0])


def median_pairwise_bandwidth(data: np.ndarray, seed: int = 0, sample: int = 256) -> float:
    """Default KDE bandwidth: median pairwise distance of a seeded
    subsample (at most `sample` points).  Falls back to 1.0 when every
    sampled pair coincides."""
    pts = np.atleast_2d(np.asarray(data, dtype=np.float64))
    n = pts.shape[0]
    if n == 0:
        raise ValueError("bandwidth needs at least one data point")
    if n > sample:
        indices = list(range(n))
        SplitMix64(seed).shuffle(indices)
        pts = pts[np.array(sorted(indices[:sample]))]
        n = sample
    if n == 1:
        return 1.0
    norms = (pts * pts).sum(axis=1)
    sq = norms[:, None] + norms[None, :] - 2.0 * (pts @ pts.T)
    np.maximum(sq, 0.0, out=sq)
    iu = np.triu_indices(n, k=1)
    dists = np.sqrt(sq[iu])
    med = float(np.median(dists))
    return med if med > 0.0 else 1.0
