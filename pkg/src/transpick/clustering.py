"""K-means over sparse feature vectors, including the incremental
variant that holds previously committed centroids fixed.

Points are (id, SparseVector) pairs.  Internally the vectors are
compacted onto the union of their non-zero dimensions and turned into
a dense array for batched distance computation; results are converted
back to sparse maps.  All randomness comes from the seeded generator,
so runs are reproducible bit-for-bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import SparseVector
from .rng import SplitMix64


@dataclass
class Clustering:
    centroids: list[SparseVector]
    assignment: dict[str, int]
    fixed_count: int
    sq_dist: dict[str, float]
    inertia: float

    def cluster_members(self, index: int) -> list[str]:
        return [ex_id for ex_id, c in self.assignment.items() if c == index]


def _compact(points, fixed_vectors):
    dims: set[int] = set()
    for _, vec in points:
        dims.update(vec.entries)
    for vec in fixed_vectors:
        dims.update(vec.entries)
    dim_list = sorted(dims) if dims else [0]
    index = {d: i for i, d in enumerate(dim_list)}
    X = np.zeros((len(points), len(dim_list)))
    for row, (_, vec) in enumerate(points):
        for d, w in vec.entries.items():
            X[row, index[d]] = w
    F = np.zeros((len(fixed_vectors), len(dim_list)))
    for row, vec in enumerate(fixed_vectors):
        for d, w in vec.entries.items():
            F[row, index[d]] = w
    return X, F, dim_list


def _sq_distances(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    xx = (X * X).sum(axis=1)
    cc = (C * C).sum(axis=1)
    D = xx[:, None] + cc[None, :] - 2.0 * (X @ C.T)
    np.maximum(D, 0.0, out=D)
    return D


def _seed_centroids(X, fixed, k_new, rng):
    """k-means++: spread the new centroids proportionally to squared
    distance from everything already chosen (fixed centroids included)."""
    n = X.shape[0]
    chosen: list[np.ndarray] = []
    if fixed.shape[0] > 0:
        d2 = _sq_distances(X, fixed).min(axis=1)
    else:
        first = X[rng.randrange(n)]
        chosen.append(first)
        d2 = ((X - first[None, :]) ** 2).sum(axis=1)
    while len(chosen) < k_new:
        idx = rng.weighted_index(d2.tolist())
        cand = X[idx]
        chosen.append(cand)
        d2 = np.minimum(d2, ((X - cand[None, :]) ** 2).sum(axis=1))
    return np.array(chosen) if chosen else np.zeros((0, X.shape[1]))


def _lloyd(ids, X, fixed, k_new, rng, max_iter, tol):
    n = X.shape[0]
    C = np.vstack([fixed, _seed_centroids(X, fixed, k_new, rng)])
    k = C.shape[0]
    n_fixed = fixed.shape[0]
    prev_wcss = float("inf")
    labels = np.zeros(n, dtype=np.int64)
    dmin = np.zeros(n)
    for _ in range(max_iter):
        D = _sq_distances(X, C)
        labels = D.argmin(axis=1)
        dmin = D[np.arange(n), labels]
        wcss = float(dmin.sum())
        if wcss > prev_wcss + 1e-9 * max(1.0, abs(prev_wcss)):
            raise AssertionError("within-cluster sum of squares increased between iterations")
        prev_wcss = wcss
        new_C = C.copy()
        for j in range(n_fixed, k):
            members = labels == j
            if members.any():
                new_C[j] = X[members].mean(axis=0)
        for j in range(n_fixed, k):
            if (labels == j).any():
                continue
            # re-seed an empty cluster at the point farthest from its
            # current centroid; if every point sits on one, leave it empty
            far = float(dmin.max())
            if far <= 0.0:
                continue
            cands = np.flatnonzero(dmin == far)
            pick = min(cands, key=lambda i: ids[i])
            new_C[j] = X[pick]
            labels[pick] = j
            dmin[pick] = 0.0
        shift = float(np.sqrt(((new_C - C) ** 2).sum(axis=1)).max()) if k else 0.0
        C = new_C
        if shift < tol:
            break
    D = _sq_distances(X, C)
    labels = D.argmin(axis=1)
    dmin = D[np.arange(n), labels]
    return C, labels, dmin


def incremental_kmeans(
    points: list[tuple[str, SparseVector]],
    fixed_centroids: list[SparseVector],
    k_new: int,
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> Clustering:
    """Cluster `points` into len(fixed_centroids) + k_new clusters while
    never moving the fixed centroids."""
    if k_new < 1:
        raise ValueError("number of new clusters must be >= 1")
    if not points:
        raise ValueError("cannot cluster an empty point list")
    if k_new > len(points):
        raise ValueError(
            f"cannot place {k_new} new clusters over {len(points)} points"
        )
    ids = [ex_id for ex_id, _ in points]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate point ids")
    X, F, dim_list = _compact(points, fixed_centroids)
    rng = SplitMix64(seed)
    C, labels, dmin = _lloyd(ids, X, F, k_new, rng, max_iter, tol)
    centroids = []
    for row in C:
        centroids.append(SparseVector({dim_list[i]: float(w) for i, w in enumerate(row) if w != 0.0}))
    assignment = {ex_id: int(lab) for ex_id, lab in zip(ids, labels)}
    sq_dist = {ex_id: float(d) for ex_id, d in zip(ids, dmin)}
    return Clustering(centroids, assignment, len(fixed_centroids), sq_dist, float(dmin.sum()))


def kmeans(
    points: list[tuple[str, SparseVector]],
    k: int,
    seed: int = 0,
    max_iter: int = 100,
    tol: float = 1e-6,
) -> Clustering:
    return incremental_kmeans(points, [], k, seed=seed, max_iter=max_iter, tol=tol)


def nearest_member(
    clustering: Clustering, cluster_index: int, points: list[tuple[str, SparseVector]]
) -> str:
    """Id of the member closest to its centroid; ties break to the
    lexicographically smaller id."""
    centroid = clustering.centroids[cluster_index]
    best: tuple[float, str] | None = None
    for ex_id, vec in points:
        if clustering.assignment.get(ex_id) != cluster_index:
            continue
        cand = (vec.sq_distance(centroid), ex_id)
        if best is None or cand < best:
            best = cand
    if best is None:
        raise ValueError(f"cluster {cluster_index} has no members")
    return best[1]
