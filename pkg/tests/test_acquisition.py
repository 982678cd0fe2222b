"""Acquisition scorers and batch selection rules."""
import math

import pytest

from transpick.acquisition import (
    amsp_aggregate,
    bias_scores,
    combine_lfs_lc_d,
    density_scores,
    error_scores,
    lcd_scores,
    lfsd_scores,
    random_scores,
    s2s_fw_scores,
    select_batch,
    select_max_compound,
    select_with_exclusion,
    semdiv_scores,
)
from transpick.clustering import Clustering
from transpick.corpus import Example
from transpick.features import SparseVector, fit_cooccurrence
from transpick.numerics import NEG_INF
from transpick.translation import TargetDistribution

LN2 = math.log(2.0)


def vec(value):
    return SparseVector({0: value})


class TestLfsd:
    def test_excludes_translated_clusters_and_scores_distance(self):
        translated = [("t1", vec(1.0))]
        untranslated = [("near", vec(1.1)), ("fa", vec(9.95)), ("fb", vec(10.05))]
        scores, clustering = lfsd_scores(untranslated, translated, k_new=1, seed=0)
        # the far pair forms the new cluster centred at 10.0
        assert scores["fa"] == pytest.approx(-0.0025, abs=1e-9)
        assert scores["fb"] == pytest.approx(-0.0025, abs=1e-9)
        # "near" falls into the translated example's cluster
        assert scores["near"] == NEG_INF
        assert clustering.fixed_count == 1
        assert clustering.centroids[0] == vec(1.0)
        assert clustering.assignment["t1"] == clustering.assignment["near"]

    def test_no_translated_examples_means_no_exclusions(self):
        untranslated = [("a", vec(0.0)), ("b", vec(0.2)), ("c", vec(8.0))]
        scores, clustering = lfsd_scores(untranslated, [], k_new=2, seed=1)
        assert clustering.fixed_count == 0
        assert all(s != NEG_INF for s in scores.values())
        assert set(scores) == {"a", "b", "c"}
        for ex_id in scores:
            assert scores[ex_id] == pytest.approx(-clustering.sq_dist[ex_id], abs=1e-12)

    def test_deterministic_per_seed(self):
        untranslated = [(f"u{i}", vec(float(i))) for i in range(12)]
        first, _ = lfsd_scores(untranslated, [("t", vec(100.0))], k_new=3, seed=5)
        second, _ = lfsd_scores(untranslated, [("t", vec(100.0))], k_new=3, seed=5)
        assert first == second


class TestLcd:
    def atoms_model(self, toy4):
        return fit_cooccurrence(toy4, "en", unit="atoms")

    def test_mean_entropy_without_coverage_decay(self, toy4):
        cooc = self.atoms_model(toy4)
        scores = lcd_scores(list(toy4), cooc, set(), beta=0.5, unit="atoms")
        assert scores == pytest.approx(
            {
                "ex1": 1.9172539988904687,
                "ex2": 1.947444945474703,
                "ex3": 2.107790027043196,
                "ex4": 2.1835613628259187,
            },
            abs=1e-9,
        )

    def test_covered_units_are_discounted(self, toy4):
        cooc = self.atoms_model(toy4)
        covered = {"answer", "next_to:t", "state", "texas"}
        scores = lcd_scores(list(toy4), cooc, covered, beta=0.5, unit="atoms")
        assert scores == pytest.approx(
            {
                "ex1": 0.9586269994452343,
                "ex2": 1.2442169298476085,
                "ex3": 1.5390583166629308,
                "ex4": 1.8702286362637937,
            },
            abs=1e-9,
        )

    def test_beta_zero_erases_covered_units(self, toy4):
        cooc = self.atoms_model(toy4)
        covered = {"answer", "next_to:t", "state", "texas"}
        scores = lcd_scores(list(toy4), cooc, covered, beta=0.0, unit="atoms")
        # every unit of ex1 is covered, so its mean collapses to zero
        assert scores["ex1"] == pytest.approx(0.0, abs=1e-12)
        assert scores["ex4"] > scores["ex1"]

    def test_beta_validation(self, toy4):
        cooc = self.atoms_model(toy4)
        for bad in (-0.1, 1.0, 1.5):
            with pytest.raises(ValueError, match="beta"):
                lcd_scores(list(toy4), cooc, set(), beta=bad, unit="atoms")


class TestCombine:
    def test_alpha_trades_off_components(self):
        lfsd = {"a": -4.0, "b": -1.0, "c": NEG_INF}
        lcd = {"a": 2.0, "b": 1.0, "c": 3.0}
        # shared reference is [-1.5, -0.25, 1.0]
        low = combine_lfs_lc_d(lfsd, lcd, alpha=0.25)
        assert low == pytest.approx({"a": -0.625, "b": -1.25, "c": NEG_INF}, abs=1e-9)
        high = combine_lfs_lc_d(lfsd, lcd, alpha=1.0)
        assert high == pytest.approx({"a": -1.75, "b": -0.5, "c": NEG_INF}, abs=1e-9)
        # small alpha favours the lexical-diversity leader, large alpha
        # the low-density leader
        assert low["a"] > low["b"]
        assert high["b"] > high["a"]

    def test_alpha_zero_keeps_exclusions(self):
        lfsd = {"a": NEG_INF, "b": 1.0}
        lcd = {"a": 5.0, "b": 3.0}
        combined = combine_lfs_lc_d(lfsd, lcd, alpha=0.0)
        assert combined["a"] == NEG_INF
        assert math.isfinite(combined["b"])

    def test_validation(self):
        with pytest.raises(ValueError, match="alpha"):
            combine_lfs_lc_d({"a": 1.0}, {"a": 1.0}, alpha=-0.5)
        with pytest.raises(ValueError, match="same ids"):
            combine_lfs_lc_d({"a": 1.0}, {"b": 1.0}, alpha=0.5)


def amsp_fixture():
    """Five candidates with hand-sized target rows and parser scores."""
    lfs = {name: f"( {name} )" for name in "abcde"}
    examples = [
        Example("e1", lfs["a"], {"en": "src one"}),
        Example("e2", lfs["b"], {"en": "src two"}),
        Example("e3", lfs["c"], {"en": "src three"}),
        Example("e4", lfs["d"], {"en": "src four"}),
        Example("e5", lfs["e"], {"en": "src five"}),
    ]
    tdist = TargetDistribution(
        rows={
            lfs["a"]: {"ta": 1.0},
            lfs["b"]: {"tb1": 0.25, "tb2": 0.25, "tb3": 0.25, "tb4": 0.25},
            lfs["c"]: {"tc1": 0.75, "tc2": 0.25},
            lfs["d"]: {"td1": 0.5, "td2": 0.5},
            lfs["e"]: {"te1": 0.5, "te2": 0.3, "te3": 0.2},
        }
    )
    table = {
        ("ta", lfs["a"]): -0.5,
        ("tb1", lfs["b"]): -1.0,
        ("tb2", lfs["b"]): -3.0,
        ("tc1", lfs["c"]): -0.2,
        ("tc2", lfs["c"]): -0.8,
        ("td1", lfs["d"]): -1.5,
        ("td2", lfs["d"]): -0.5,
        ("te1", lfs["e"]): -0.4,
        ("te2", lfs["e"]): -1.2,
        ("src one", lfs["a"]): -0.1,
        ("src two", lfs["b"]): -2.5,
        ("src three", lfs["c"]): -0.3,
        ("src four", lfs["d"]): -1.1,
        ("src five", lfs["e"]): -0.9,
    }
    return examples, tdist, table


class TableParser:
    def __init__(self, table):
        self.table = table

    def score(self, utterance, lf):
        return self.table[(utterance, lf)]


class IdentityTranslator:
    def forward(self, utterance):
        return utterance

    def backward(self, utterance):
        return utterance


class SuffixTranslator:
    def forward(self, utterance):
        return utterance + " fwd"

    def backward(self, utterance):
        return utterance + " bwd"


EMBED_POS = {"e1": 0.0, "e2": 0.1, "e3": 0.2, "e4": 2.0, "e5": 4.0}

DENSITY_EXPECTED = {
    "e1": -0.552613677396,
    "e2": -0.517687322555,
    "e3": -0.540859550152,
    "e4": -1.148514083902,
    "e5": -1.430234875316,
}


def amsp_bias_error(variant):
    examples, tdist, table = amsp_fixture()
    bias = bias_scores(tdist, examples, variant=variant, n_best=2)
    error = error_scores(
        tdist,
        IdentityTranslator(),
        TableParser(table),
        examples,
        "en",
        variant=variant,
        n_best=2,
    )
    return bias, error


class TestBiasAndError:
    def test_nbest_variant(self):
        bias, error = amsp_bias_error("nbest")
        assert bias == pytest.approx(
            {
                "e1": 0.0,
                "e2": -LN2,
                "e3": -0.5623351446188083,
                "e4": -LN2,
                "e5": -0.6615632381579821,
            },
            abs=1e-9,
        )
        assert error == pytest.approx(
            {"e1": 0.5, "e2": 2.0, "e3": 0.35, "e4": 1.0, "e5": 0.7}, abs=1e-9
        )

    def test_max_variant(self):
        bias, error = amsp_bias_error("max")
        assert bias == pytest.approx(
            {
                "e1": 0.0,
                "e2": -math.log(4.0),
                "e3": math.log(0.75),
                "e4": -LN2,
                "e5": -LN2,
            },
            abs=1e-9,
        )
        assert error == pytest.approx(
            {"e1": 0.1, "e2": 2.5, "e3": 0.3, "e4": 1.1, "e5": 0.9}, abs=1e-9
        )

    def test_max_variant_can_probe_round_trip(self):
        examples, tdist, table = amsp_fixture()
        probe = examples[:1]
        table[("src one fwd bwd", "( a )")] = -7.0
        error = error_scores(
            tdist,
            SuffixTranslator(),
            TableParser(table),
            probe,
            "en",
            variant="max",
            backtranslate_max=True,
        )
        assert error == {"e1": 7.0}

    def test_unknown_variant_rejected(self):
        examples, tdist, table = amsp_fixture()
        with pytest.raises(ValueError, match="unknown bias variant"):
            bias_scores(tdist, examples, variant="median")
        with pytest.raises(ValueError, match="unknown error variant"):
            error_scores(
                tdist, IdentityTranslator(), TableParser(table), examples, "en", variant="median"
            )


class TestDensity:
    def embeddings(self):
        return [(ex_id, vec(pos)) for ex_id, pos in sorted(EMBED_POS.items())]

    def test_log_density_of_candidate_cloud(self):
        points = self.embeddings()
        scores = density_scores(points, [v for _, v in points], bandwidth=1.0)
        assert scores == pytest.approx(DENSITY_EXPECTED, abs=1e-9)

    def test_dense_region_beats_outlier(self):
        points = self.embeddings()
        scores = density_scores(points, [v for _, v in points], bandwidth=1.0)
        assert scores["e2"] > scores["e4"] > scores["e5"]

    def test_default_bandwidth_is_seeded(self):
        points = self.embeddings()
        data = [v for _, v in points]
        assert density_scores(points, data, seed=3) == density_scores(points, data, seed=3)

    def test_empty_pool_rejected(self):
        with pytest.raises(ValueError, match="non-empty data pool"):
            density_scores(self.embeddings(), [], bandwidth=1.0)


class TestSemdiv:
    def clustering(self):
        return Clustering(
            centroids=[vec(0.0), vec(5.0), vec(9.0)],
            assignment={"s1": 0, "c1": 0, "c2": 1, "c3": 2},
            fixed_count=0,
            sq_dist={},
            inertia=0.0,
        )

    def test_occupied_clusters_are_excluded(self):
        scores = semdiv_scores(self.clustering(), ["c1", "c2", "c3"], ["s1"])
        assert scores == {"c1": NEG_INF, "c2": 0.0, "c3": 0.0}

    def test_no_selections_means_no_exclusions(self):
        scores = semdiv_scores(self.clustering(), ["c1", "c2", "c3"], [])
        assert scores == {"c1": 0.0, "c2": 0.0, "c3": 0.0}


class TestAmspAggregate:
    def nbest_components(self):
        bias, error = amsp_bias_error("nbest")
        points = [(ex_id, vec(pos)) for ex_id, pos in sorted(EMBED_POS.items())]
        density = density_scores(points, [v for _, v in points], bandwidth=1.0)
        return {"bias": bias, "density": density, "error": error}

    def max_components(self):
        bias, error = amsp_bias_error("max")
        points = [(ex_id, vec(pos)) for ex_id, pos in sorted(EMBED_POS.items())]
        density = density_scores(points, [v for _, v in points], bandwidth=1.0)
        return {"bias": bias, "density": density, "error": error}

    @staticmethod
    def ranking(scores):
        return sorted(scores, key=lambda ex_id: (-scores[ex_id], ex_id))

    def test_nbest_aggregate_matches_hand_table(self):
        components = self.nbest_components()
        agg = amsp_aggregate(components, {"bias": 1.0, "density": 1.0, "error": 1.0})
        assert agg == pytest.approx(
            {
                "e1": -0.12450850085729909,
                "e2": 0.4690345649068922,
                "e3": -0.659923815139108,
                "e4": -1.000792539800767,
                "e5": -0.9339119623281417,
            },
            abs=1e-9,
        )
        assert self.ranking(agg) == ["e2", "e1", "e3", "e5", "e4"]

    def test_max_aggregate_matches_hand_table(self):
        components = self.max_components()
        agg = amsp_aggregate(components, {"bias": 1.0, "density": 1.0, "error": 1.0})
        assert agg == pytest.approx(
            {
                "e1": -0.35999247231570286,
                "e2": 0.41603203948469314,
                "e3": -0.33291483655665555,
                "e4": -0.7379713160918551,
                "e5": -1.3353337185337848,
            },
            abs=1e-9,
        )
        assert self.ranking(agg) == ["e2", "e3", "e1", "e4", "e5"]

    def test_coefficients_shift_the_argmax(self):
        components = self.max_components()
        agg = amsp_aggregate(components, {"bias": 2.0, "density": 0.5, "error": 1.0})
        assert agg == pytest.approx(
            {
                "e1": 0.35840522982530787,
                "e2": -0.8198631522346779,
                "e3": -0.2876717736572839,
                "e4": -0.7955981257512401,
                "e5": -1.1971491995309618,
            },
            abs=1e-9,
        )
        assert self.ranking(agg)[0] == "e1"

    def test_excluded_component_dominates(self):
        components = self.nbest_components()
        components["semdiv"] = {"e1": NEG_INF, "e2": NEG_INF, "e3": 0.0, "e4": 0.0, "e5": 0.0}
        coeffs = {name: 1.0 for name in components}
        agg = amsp_aggregate(components, coeffs)
        assert agg["e1"] == NEG_INF
        assert agg["e2"] == NEG_INF
        assert all(math.isfinite(agg[e]) for e in ("e3", "e4", "e5"))
        assert set(select_batch(agg, 2)) <= {"e3", "e4", "e5"}

    def test_validation(self):
        components = {"bias": {"a": 1.0}}
        with pytest.raises(ValueError, match="match component names"):
            amsp_aggregate(components, {"density": 1.0})
        with pytest.raises(ValueError, match="must be >= 0"):
            amsp_aggregate(components, {"bias": -1.0})
        with pytest.raises(ValueError, match="at least one component"):
            amsp_aggregate({}, {})
        with pytest.raises(ValueError, match="same ids"):
            amsp_aggregate(
                {"bias": {"a": 1.0}, "error": {"b": 1.0}}, {"bias": 1.0, "error": 1.0}
            )


class TestBaselines:
    def test_random_scores_ignore_insertion_order(self):
        forward = random_scores(["a", "b", "c"], seed=5)
        backward = random_scores(["c", "b", "a"], seed=5)
        assert forward == backward
        assert all(0.0 <= s < 1.0 for s in forward.values())
        assert random_scores(["a", "b", "c"], seed=6) != forward

    def test_s2s_fw_negates_gold_pair_confidence(self):
        examples, _, table = amsp_fixture()
        scores = s2s_fw_scores(TableParser(table), examples, "en")
        assert scores == pytest.approx(
            {"e1": 0.1, "e2": 2.5, "e3": 0.3, "e4": 1.1, "e5": 0.9}, abs=1e-12
        )


class TestSelectBatch:
    def test_ranks_desc_then_id(self):
        scores = {"b": 2.0, "a": 2.0, "c": 5.0, "d": NEG_INF}
        assert select_batch(scores, 3) == ["c", "a", "b"]

    def test_rejects_small_k_and_exhausted_pool(self):
        with pytest.raises(ValueError, match="batch size"):
            select_batch({"a": 1.0}, 0)
        with pytest.raises(ValueError, match="only 1 finite-scored"):
            select_batch({"a": 1.0, "b": NEG_INF}, 2)


class TestSelectWithExclusion:
    def test_skips_same_group(self):
        scores = {"a": 5.0, "b": 4.0, "c": 3.0, "d": 2.0}
        groups = {"a": 1, "b": 1, "c": 2, "d": 2}
        assert select_with_exclusion(scores, 2, groups) == ["a", "c"]

    def test_ungrouped_ids_always_eligible(self):
        scores = {"a": 5.0, "b": 4.0, "free": 3.0}
        groups = {"a": 1, "b": 1}
        assert select_with_exclusion(scores, 2, groups) == ["a", "free"]

    def test_exhaustion_under_groups_rejected(self):
        scores = {"a": 5.0, "b": 4.0}
        groups = {"a": 1, "b": 1}
        with pytest.raises(ValueError, match="under group exclusion"):
            select_with_exclusion(scores, 2, groups)

    def test_excluded_scores_never_selected(self):
        scores = {"a": NEG_INF, "b": 1.0}
        assert select_with_exclusion(scores, 1, {}) == ["b"]


class TestSelectMaxCompound:
    def test_greedy_coverage_on_toy_corpus(self, toy4):
        assert select_max_compound(list(toy4), set(), 2) == ["ex1", "ex4"]

    def test_existing_coverage_changes_first_pick(self, toy4):
        from transpick.features import cached_units

        covered = set(cached_units(TOY4_LF_EX1, "both"))
        assert select_max_compound(list(toy4), covered, 1) == ["ex4"]

    def test_all_covered_falls_back_to_id_order(self, toy4):
        from transpick.features import cached_units

        covered = set()
        for ex in toy4:
            covered |= set(cached_units(ex.lf, "both"))
        assert select_max_compound(list(toy4), covered, 2) == ["ex1", "ex2"]

    def test_validation(self, toy4):
        with pytest.raises(ValueError, match="batch size"):
            select_max_compound(list(toy4), set(), 0)
        with pytest.raises(ValueError, match="only 4 candidates"):
            select_max_compound(list(toy4), set(), 5)


TOY4_LF_EX1 = "( answer ( state ( next_to:t texas ) ) )"
