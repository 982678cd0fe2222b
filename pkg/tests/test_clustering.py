"""K-means and its fixed-centroid incremental variant."""
import numpy as np
import pytest

from transpick.clustering import Clustering, incremental_kmeans, kmeans, nearest_member
from transpick.features import SparseVector
from transpick.rng import SplitMix64


def vec(*pairs):
    return SparseVector(dict(pairs))


def blob_points(center, count, spread, rng, prefix):
    points = []
    for i in range(count):
        entries = {
            dim: center.get(dim, 0.0) + spread * (rng.random() - 0.5)
            for dim in range(3)
        }
        points.append((f"{prefix}{i}", SparseVector(entries)))
    return points


class TestKmeans:
    def test_separates_two_blobs(self):
        rng = SplitMix64(11)
        left = blob_points({0: -10.0}, 8, 0.5, rng, "l")
        right = blob_points({0: 10.0}, 8, 0.5, rng, "r")
        result = kmeans(left + right, 2, seed=3)
        left_labels = {result.assignment[ex_id] for ex_id, _ in left}
        right_labels = {result.assignment[ex_id] for ex_id, _ in right}
        assert len(left_labels) == 1
        assert len(right_labels) == 1
        assert left_labels != right_labels
        assert result.fixed_count == 0

    def test_k_equals_n_gives_singletons(self):
        points = [("a", vec((0, 0.0))), ("b", vec((0, 5.0))), ("c", vec((0, 9.0)))]
        result = kmeans(points, 3, seed=0)
        assert sorted(result.assignment.values()) == [0, 1, 2]
        assert result.inertia == pytest.approx(0.0, abs=1e-12)
        for ex_id, _ in points:
            assert result.sq_dist[ex_id] == pytest.approx(0.0, abs=1e-12)

    def test_duplicate_coordinates_are_fine(self):
        points = [("a", vec((0, 1.0))), ("b", vec((0, 1.0))), ("c", vec((0, 1.0)))]
        result = kmeans(points, 2, seed=0)
        assert set(result.assignment) == {"a", "b", "c"}
        assert result.inertia == pytest.approx(0.0, abs=1e-12)

    def test_deterministic_per_seed(self):
        rng = SplitMix64(5)
        points = blob_points({0: 0.0}, 20, 10.0, rng, "p")
        first = kmeans(points, 4, seed=9)
        second = kmeans(points, 4, seed=9)
        assert first.assignment == second.assignment
        assert first.inertia == second.inertia

    def test_inertia_matches_reported_distances(self):
        rng = SplitMix64(21)
        points = blob_points({1: 2.0}, 15, 4.0, rng, "p")
        result = kmeans(points, 3, seed=1)
        assert result.inertia == pytest.approx(sum(result.sq_dist.values()), abs=1e-9)

    def test_never_worse_than_trivial_clustering(self):
        # inertia with k clusters can't exceed the single-centroid optimum
        rng = SplitMix64(8)
        for trial in range(10):
            points = blob_points({0: 0.0, 2: 1.0}, 12, 6.0, rng, f"t{trial}_")
            X = np.array(
                [[p.entries.get(d, 0.0) for d in range(3)] for _, p in points]
            )
            single = float(((X - X.mean(axis=0)) ** 2).sum())
            result = kmeans(points, 3, seed=trial)
            assert result.inertia <= single + 1e-9


class TestIncremental:
    def test_fixed_centroids_do_not_move(self):
        frozen = vec((0, -100.0))
        rng = SplitMix64(13)
        points = blob_points({0: 5.0}, 10, 2.0, rng, "p")
        result = incremental_kmeans(points, [frozen], 2, seed=2)
        assert result.fixed_count == 1
        assert result.centroids[0] == frozen

    def test_point_on_fixed_centroid_joins_it(self):
        frozen = vec((0, 4.0))
        points = [("near", vec((0, 4.0))), ("far_a", vec((0, 50.0))), ("far_b", vec((0, 52.0)))]
        result = incremental_kmeans(points, [frozen], 1, seed=0)
        assert result.assignment["near"] == 0
        assert result.assignment["far_a"] == result.assignment["far_b"] == 1

    def test_new_cluster_indices_start_after_fixed(self):
        frozen = [vec((0, -50.0)), vec((0, 50.0))]
        points = [("a", vec((0, 0.0))), ("b", vec((0, 0.5)))]
        result = incremental_kmeans(points, frozen, 1, seed=0)
        assert len(result.centroids) == 3
        assert {result.assignment["a"], result.assignment["b"]} == {2}

    def test_cluster_members_lists_assigned_ids(self):
        points = [("a", vec((0, 0.0))), ("b", vec((0, 0.1))), ("c", vec((0, 99.0)))]
        result = kmeans(points, 2, seed=0)
        members = result.cluster_members(result.assignment["c"])
        assert members == ["c"]

    @pytest.mark.parametrize(
        "points, k_new, message",
        [
            ([("a", vec((0, 1.0)))], 0, "new clusters must be >= 1"),
            ([], 1, "empty point list"),
            ([("a", vec((0, 1.0)))], 2, "cannot place 2 new clusters"),
            ([("a", vec((0, 1.0))), ("a", vec((0, 2.0)))], 1, "duplicate point ids"),
        ],
    )
    def test_rejects_bad_input(self, points, k_new, message):
        with pytest.raises(ValueError, match=message):
            incremental_kmeans(points, [], k_new)


class TestNearestMember:
    def test_picks_closest_to_centroid(self):
        points = [("a", vec((0, 0.0))), ("b", vec((0, 1.0))), ("c", vec((0, 10.0)))]
        result = kmeans(points, 2, seed=0)
        cluster = result.assignment["a"]
        assert result.assignment["b"] == cluster
        # centroid of {a, b} sits at 0.5, so the tie breaks by id
        assert nearest_member(result, cluster, points) == "a"

    def test_tie_breaks_to_smaller_id(self):
        clustering = Clustering(
            centroids=[vec((0, 0.0))],
            assignment={"zz": 0, "aa": 0},
            fixed_count=0,
            sq_dist={"zz": 1.0, "aa": 1.0},
            inertia=2.0,
        )
        points = [("zz", vec((0, 1.0))), ("aa", vec((0, -1.0)))]
        assert nearest_member(clustering, 0, points) == "aa"

    def test_empty_cluster_rejected(self):
        points = [("a", vec((0, 0.0))), ("b", vec((0, 1.0)))]
        result = incremental_kmeans(points, [vec((0, 500.0))], 1, seed=0)
        with pytest.raises(ValueError, match="no members"):
            nearest_member(result, 0, points)
