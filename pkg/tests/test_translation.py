"""Translation oracles, the lexicon-based MT stand-in, and target-side
utterance distributions."""
import pytest

from transpick.translation import (
    CallbackOracle,
    GoldRevealOracle,
    NoisyLexiconTranslator,
    TargetDistribution,
    fit_target_distribution,
    load_lexicon,
)


class TestGoldRevealOracle:
    def test_reveals_held_back_side(self, toy4):
        oracle = GoldRevealOracle(toy4)
        out = oracle.translate(["ex1", "ex3"], "de")
        assert out == {
            "ex1": "welche staaten grenzen an texas",
            "ex3": "nenne die fluesse in texas",
        }

    def test_missing_gold_side_rejected(self, toy4):
        oracle = GoldRevealOracle(toy4.restrict_language("en"))
        with pytest.raises(ValueError, match="no gold 'de' utterance"):
            oracle.translate(["ex1"], "de")

    def test_unknown_id_rejected(self, toy4):
        with pytest.raises(KeyError):
            GoldRevealOracle(toy4).translate(["nope"], "de")


class TestCallbackOracle:
    def test_passes_through_and_filters_extras(self):
        oracle = CallbackOracle(lambda ids, lang: {"a": "eins", "b": "zwei", "extra": "x"})
        assert oracle.translate(["a", "b"], "de") == {"a": "eins", "b": "zwei"}

    def test_missing_or_empty_results_rejected(self):
        oracle = CallbackOracle(lambda ids, lang: {"a": "eins", "b": ""})
        with pytest.raises(ValueError, match="no utterance for"):
            oracle.translate(["a", "b"], "de")

    def test_receives_requested_ids_and_language(self):
        seen = {}

        def fn(ids, lang):
            seen["ids"] = ids
            seen["lang"] = lang
            return {i: f"t-{i}" for i in ids}

        CallbackOracle(fn).translate(["x", "y"], "fr")
        assert seen == {"ids": ["x", "y"], "lang": "fr"}


class TestLexicon:
    def test_loads_tab_separated_pairs(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("# comment\nstate\tstaat\n\nriver\tfluss\n", encoding="utf-8")
        assert load_lexicon(str(path)) == {"state": "staat", "river": "fluss"}

    @pytest.mark.parametrize("line", ["justone", "a\tb\tc", "\tb", "a\t"])
    def test_malformed_lines_rejected(self, tmp_path, line):
        path = tmp_path / "lex.tsv"
        path.write_text(line + "\n", encoding="utf-8")
        with pytest.raises(ValueError, match="line 1"):
            load_lexicon(str(path))


class TestNoisyLexiconTranslator:
    def test_zero_dropout_is_pure_substitution(self):
        mt = NoisyLexiconTranslator(seed=0, dropout=0.0, lexicon={"state": "staat"})
        assert mt.forward("the state line") == "the staat line"
        assert mt.backward("the staat line") == "the state line"

    def test_backward_inverts_lexicon(self):
        mt = NoisyLexiconTranslator(seed=0, dropout=0.0, lexicon={"river": "fluss"})
        assert mt.backward(mt.forward("river bank")) == "river bank"

    def test_per_utterance_determinism(self):
        mt = NoisyLexiconTranslator(seed=42, dropout=0.5)
        first = mt.forward("one two three four five six")
        assert mt.forward("one two three four five six") == first
        again = NoisyLexiconTranslator(seed=42, dropout=0.5)
        assert again.forward("one two three four five six") == first

    def test_call_order_does_not_matter(self):
        a = NoisyLexiconTranslator(seed=7, dropout=0.4)
        b = NoisyLexiconTranslator(seed=7, dropout=0.4)
        a.forward("warm up call")
        assert a.forward("the real utterance here") == b.forward("the real utterance here")

    def test_directions_use_independent_noise(self):
        mt = NoisyLexiconTranslator(seed=3, dropout=0.5)
        utterances = [f"alpha beta gamma delta {i}" for i in range(20)]
        assert any(mt.forward(u) != mt.backward(u) for u in utterances)

    def test_output_never_empty(self):
        mt = NoisyLexiconTranslator(seed=1, dropout=0.9)
        for i in range(50):
            assert mt.forward(f"word{i} and some more tokens") != ""

    def test_validation(self):
        with pytest.raises(ValueError, match="dropout"):
            NoisyLexiconTranslator(dropout=1.0)
        with pytest.raises(ValueError, match="dropout"):
            NoisyLexiconTranslator(dropout=-0.1)
        mt = NoisyLexiconTranslator(dropout=0.0)
        with pytest.raises(ValueError, match="empty utterance"):
            mt.forward("")


class TestTargetDistribution:
    def fit_example(self):
        return fit_target_distribution(
            [
                ("( a )", "u one"),
                ("( a )", "u one"),
                ("( a )", "u two"),
                ("( a )", "u three"),
                ("( b )", "only"),
            ]
        )

    def test_counts_normalize_per_lf(self):
        dist = self.fit_example()
        assert dist.row("( a )") == pytest.approx(
            {"u one": 0.5, "u two": 0.25, "u three": 0.25}
        )
        assert dist.row("( b )") == {"only": 1.0}

    def test_lf_keys_are_whitespace_normalized(self):
        dist = self.fit_example()
        assert dist.has_lf("(  a   )")
        assert dist.row("(  a   )") == dist.row("( a )")
        assert not dist.has_lf("( c )")

    def test_nbest_renormalizes(self):
        dist = fit_target_distribution(
            [("( x )", "a")] * 5 + [("( x )", "b")] * 3 + [("( x )", "c")] * 2
        )
        top2 = dist.nbest("( x )", 2)
        assert top2[0] == ("a", pytest.approx(0.625))
        assert top2[1] == ("b", pytest.approx(0.37499999999999994))

    def test_nbest_ties_are_lexicographic(self):
        dist = fit_target_distribution([("( x )", "zeta"), ("( x )", "alpha")])
        assert [utt for utt, _ in dist.nbest("( x )", 1)] == ["alpha"]

    def test_nbest_caps_at_row_size(self):
        dist = self.fit_example()
        full = dist.nbest("( b )", 10)
        assert full == [("only", pytest.approx(1.0))]

    def test_validation(self):
        dist = self.fit_example()
        with pytest.raises(ValueError, match="n must be"):
            dist.nbest("( a )", 0)
        with pytest.raises(KeyError, match="no target distribution"):
            dist.row("( zzz )")
        with pytest.raises(ValueError, match="zero observations"):
            fit_target_distribution([])
        with pytest.raises(ValueError, match="empty target utterance"):
            fit_target_distribution([("( a )", "")])

    def test_empty_distribution_type_is_plain_mapping(self):
        dist = TargetDistribution(rows={})
        assert not dist.has_lf("( a )")
