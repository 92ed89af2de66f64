from __future__ import annotations

import math

import pytest
from hypothesis import given, strategies as st

from threadknit.errors import DegeneracyError, LexiconError
from threadknit.sentiment import (
    Lexicon,
    aggregate_alpha,
    batch_alpha,
    clean_text,
    load_lexicon,
    parse_lexicon,
    score_text,
)

from conftest import HAND_SCORED_TEXTS, make_batch, make_status


class TestCleanText:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("Hello World", "hello world"),
            ("check https://t.co/abc out", "check out"),
            ("see www.example.com/page now", "see now"),
            ("@user thanks!", "thanks"),
            ("#Christmas morning", "christmas morning"),
            ("it's fine", "it's fine"),
            ("it’s fine", "it's fine"),
            ("'quoted' words", "quoted words"),
            ("rock 'n' roll", "rock n roll"),
            ("a   b\t\nc", "a b c"),
            ("C'mon, don't stop", "c'mon don't stop"),
            ("100% effort!!!", "100 effort"),
            ("", ""),
            ("   ", ""),
            ("@only_mention", ""),
            ("https://only.example/url", ""),
            ("naïve café", "naïve café"),
        ],
    )
    def test_examples(self, raw, expected):
        assert clean_text(raw) == expected

    @given(st.text(max_size=200))
    def test_idempotent(self, raw):
        once = clean_text(raw)
        assert clean_text(once) == once

    @given(st.text(max_size=200))
    def test_output_shape(self, raw):
        out = clean_text(raw)
        assert out == out.strip()
        assert "  " not in out
        assert out == out.lower()
        assert "\n" not in out and "\t" not in out

    def test_mention_mid_sentence(self):
        assert clean_text("hey @a @b: meet @c_d9 later") == "hey meet later"

    def test_hashtag_keeps_the_tag_word(self):
        assert clean_text("#go #TeamRed #123") == "go teamred 123"


class TestScoreText:
    @pytest.mark.parametrize("raw,expected", HAND_SCORED_TEXTS)
    def test_hand_scored(self, mini_lexicon, raw, expected):
        assert score_text(raw, mini_lexicon) == expected

    def test_sum_not_mean(self, mini_lexicon):
        assert score_text("good good good filler", mini_lexicon) == 3.0

    def test_unknown_tokens_are_zero(self, mini_lexicon):
        assert score_text("xyzzy plugh", mini_lexicon) == 0.0

    @given(st.lists(st.sampled_from(sorted(HAND_SCORED_TEXTS)), max_size=6))
    def test_concatenation_adds(self, mini_lexicon, scored):
        texts = [raw for raw, _ in scored]
        joined = " . ".join(texts)
        total = sum(score_text(t, mini_lexicon) for t in texts)
        assert score_text(joined, mini_lexicon) == pytest.approx(total, abs=1e-12)

    def test_scaled_lexicon_scales_scores(self, mini_lexicon):
        doubled = Lexicon(
            name="x2", entries={k: 2 * v for k, v in mini_lexicon.entries.items()}
        )
        for raw, expected in HAND_SCORED_TEXTS:
            assert score_text(raw, doubled) == 2 * expected


class TestBatchAlpha:
    def test_mean_over_statuses(self, mini_lexicon):
        statuses = [
            make_status(i, "a", text=raw) for i, (raw, _) in enumerate(HAND_SCORED_TEXTS)
        ]
        alpha = batch_alpha(make_batch(statuses), mini_lexicon)
        assert alpha == pytest.approx(0.4, abs=1e-12)

    def test_single_status(self, mini_lexicon):
        alpha = batch_alpha(make_batch([make_status(0, "a", text="great")]), mini_lexicon)
        assert alpha == 2.0

    def test_empty_batch_rejected(self, mini_lexicon):
        with pytest.raises(DegeneracyError, match="Subject"):
            batch_alpha(make_batch([]), mini_lexicon)

    def test_aggregate(self):
        assert aggregate_alpha([0.1, 0.2, 0.3]) == pytest.approx(0.2, abs=1e-15)
        assert aggregate_alpha([1.5]) == 1.5
        with pytest.raises(DegeneracyError):
            aggregate_alpha([])

    @given(st.lists(st.floats(-5, 5), min_size=1, max_size=40))
    def test_aggregate_bounded_by_extremes(self, alphas):
        agg = aggregate_alpha(alphas)
        assert min(alphas) - 1e-9 <= agg <= max(alphas) + 1e-9


class TestLexiconParsing:
    def test_parse_basic(self):
        lex = parse_lexicon("# comment\nabandon\t-2\n\nzest\t2\n", name="t")
        assert lex.valence("abandon") == -2.0
        assert lex.valence("zest") == 2.0
        assert lex.valence("missing") == 0.0
        assert len(lex) == 2

    def test_duplicate_token_rejected(self):
        with pytest.raises(LexiconError, match="duplicate"):
            parse_lexicon("joy\t2\njoy\t1\n")

    @pytest.mark.parametrize(
        "line",
        ["joy", "joy\ttwo", "\t2", "joy\tnan", "joy\tinf", "Joy Ride\t2"],
    )
    def test_malformed_line_rejected(self, line):
        with pytest.raises(LexiconError):
            parse_lexicon(line + "\n")

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("calm\t0.5\nstorm\t-1\n", encoding="utf-8")
        lex = load_lexicon(path)
        assert lex.valence("storm") == -1.0

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(LexiconError):
            load_lexicon(tmp_path / "absent.tsv")

    def test_empty_lexicon_rejected(self):
        with pytest.raises(LexiconError):
            parse_lexicon("# nothing\n")


class TestBundledLexicon:
    def test_size_and_balance(self, lexicon):
        assert len(lexicon) > 2000
        negative = sum(1 for v in lexicon.entries.values() if v < 0)
        assert negative > len(lexicon) / 2

    def test_tokens_survive_cleaning(self, lexicon):
        for token in lexicon.entries:
            assert clean_text(token) == token

    def test_valences_are_finite_half_steps(self, lexicon):
        for token, valence in lexicon.entries.items():
            assert math.isfinite(valence)
            assert abs(valence) <= 3.0
            assert (2 * valence) == int(2 * valence)
            assert valence != 0.0

    def test_spot_checks(self, lexicon):
        assert lexicon.valence("love") > 0
        assert lexicon.valence("hate") < 0
        assert lexicon.valence("the") == 0.0

    def test_cached_instance(self, lexicon):
        from threadknit.sentiment import bundled_lexicon

        assert bundled_lexicon() is lexicon or bundled_lexicon() == lexicon
