from __future__ import annotations

import random

import pytest

from benchscript.augment import (
    BUILTIN_ADVICE,
    SHA1_TOOLTIP,
    AugmentationRule,
    Decoration,
    DecorationShape,
    Effects,
    Matcher,
    MatcherKind,
    RuleProblem,
    RulesetError,
    Stage,
    UnknownRulesetError,
    builtin_ruleset,
    compute_spans,
    ruleset_from_json,
    taxonomy_coverage,
)
from benchscript.diagnostics import SourceText

from oracle_augment import engine_span_tuples, oracle_spans


def rule(rid, value, priority=0, kind=MatcherKind.LITERAL, **channels):
    return AugmentationRule(rid, priority, (Matcher(kind, value),), Effects(**channels))


def spans_for(text, rules, catalog=None, problems=None):
    return compute_spans(text, rules, catalog, problems)


class TestSmalltalkRuleset:
    def test_spec_line(self):
        spans = spans_for('self foo: 42 "note"', builtin_ruleset("smalltalk"))
        wanted = {
            ("st-keywords", 0, 4): {"foreground": "royalblue", "font_weight": "bold"},
            ("st-messages", 5, 9): {"foreground": "orange"},
            ("st-numbers-and-strings", 10, 12): {"foreground": "mediumaquamarine"},
            ("st-comments", 13, 19): {"foreground": "lightgreen", "font_style": "italic"},
        }
        got = {(s.rule_id, s.span.start, s.span.end): s.effects.to_json() for s in spans}
        assert got == wanted
        assert all(s.stage is Stage.TRANSFORM for s in spans)

    def test_postcard_matches_oracle(self, postcard):
        rules = builtin_ruleset("smalltalk")
        assert engine_span_tuples(spans_for(postcard, rules)) \
            == oracle_spans(postcard, rules)

    def test_multiline_comment_is_one_span_with_fragments(self, postcard):
        spans = spans_for(postcard, builtin_ruleset("smalltalk"))
        comments = [s for s in spans if s.rule_id == "st-comments"]
        big = max(comments, key=lambda s: s.span.end - s.span.start)
        assert len(big.line_fragments) > 1
        src = SourceText(postcard)
        joined = "".join(src.slice(f) for f in big.line_fragments)
        assert joined == src.slice(big.span)


class TestOverlayRuleset:
    MAPPING = {"F1001": "Category ID", "T2000": "Categories", "F2001": "Name"}

    def test_clear_text_display(self):
        text = "F1001.T2000.F2001"
        spans = spans_for(text, builtin_ruleset("identifier_overlay", self.MAPPING))
        overlays = [s for s in spans if s.effects.overlay_text is not None]
        assert [s.effects.overlay_text for s in overlays] \
            == ["Category ID", "Categories", "Name"]
        assert all(s.stage is Stage.INLINE for s in overlays)

    def test_document_untouched(self):
        src = SourceText("F1001.T2000.F2001")
        before = src.content
        spans_for(src, builtin_ruleset("identifier_overlay", self.MAPPING))
        assert src.content == before

    def test_params_required(self):
        with pytest.raises(RulesetError):
            builtin_ruleset("identifier_overlay")

    def test_unknown_ruleset(self):
        with pytest.raises(UnknownRulesetError):
            builtin_ruleset("made_up")


class TestSha1Ruleset:
    def test_flags_call_site(self):
        spans = spans_for('x = hash_sha1("s");', builtin_ruleset("sha1_warning"),
                          BUILTIN_ADVICE)
        assert len(spans) == 1
        span = spans[0]
        assert span.stage is Stage.BACKGROUND
        assert span.effects.tooltip == SHA1_TOOLTIP
        assert span.effects.decoration == Decoration(DecorationShape.UNDERLINE_BRACKET, "red")
        assert span.advice is not None
        assert span.advice.secure_action is not None
        assert span.advice.links

    def test_no_match_no_spans(self):
        assert spans_for("let x = hash_sha512(\"s\");",
                         builtin_ruleset("sha1_warning"), BUILTIN_ADVICE) == []


class TestConflictPolicy:
    def test_priority_dominance_same_range(self):
        rules = [rule("low", "word", priority=1, foreground="red"),
                 rule("high", "word", priority=2, foreground="blue")]
        spans = spans_for("a word here", rules)
        foregrounds = {s.rule_id: s.effects.foreground for s in spans}
        assert foregrounds.get("high") == "blue"
        assert "low" not in foregrounds  # its only channel lost, span dropped

    def test_loser_keeps_other_channels(self):
        rules = [rule("low", "word", priority=1, foreground="red", font_style="italic"),
                 rule("high", "word", priority=2, foreground="blue")]
        spans = spans_for("word", rules)
        low = [s for s in spans if s.rule_id == "low"][0]
        assert low.effects.foreground is None
        assert low.effects.font_style == "italic"

    def test_equal_priority_later_id_wins(self):
        rules = [rule("a-rule", "word", priority=5, foreground="red"),
                 rule("z-rule", "word", priority=5, foreground="blue")]
        spans = spans_for("word", rules)
        survivors = {s.rule_id for s in spans}
        assert survivors == {"z-rule"}

    def test_overlapping_overlays_drop_later(self):
        rules = [rule("inner", "bcd", priority=1, overlay_text="INNER"),
                 rule("outer", "abcde", priority=9, overlay_text="OUTER")]
        spans = spans_for("abcde", rules)
        overlays = [s for s in spans if s.effects.overlay_text]
        assert [s.rule_id for s in overlays] == ["outer"]

    def test_equal_priority_earliest_overlay_wins(self):
        rules = [rule("late", "cdef", priority=1, overlay_text="L"),
                 rule("early", "abcd", priority=1, overlay_text="E")]
        spans = spans_for("abcdef", rules)
        overlays = [s for s in spans if s.effects.overlay_text]
        assert [s.rule_id for s in overlays] == ["early"]

    def test_non_overlapping_overlays_all_survive(self):
        rules = [rule("one", "aa", priority=1, overlay_text="1"),
                 rule("two", "bb", priority=2, overlay_text="2")]
        spans = spans_for("aa bb aa", rules)
        assert len([s for s in spans if s.effects.overlay_text]) == 3


class TestEngineBasics:
    def test_empty_ruleset(self):
        assert spans_for("anything", []) == []

    def test_invalid_pattern_reported_rest_applied(self):
        problems: list[RuleProblem] = []
        rules = [rule("bad", "(unclosed", kind=MatcherKind.REGEX, foreground="red"),
                 rule("good", "x", foreground="blue")]
        spans = spans_for("x", rules, problems=problems)
        assert [p.rule_id for p in problems] == ["bad"]
        assert problems[0].kind == "InvalidPattern"
        assert [s.rule_id for s in spans] == ["good"]

    def test_purity(self, postcard):
        rules = builtin_ruleset("smalltalk")
        first = engine_span_tuples(spans_for(postcard, rules))
        second = engine_span_tuples(spans_for(postcard, rules))
        assert first == second

    def test_rule_needs_matcher(self):
        with pytest.raises(RulesetError):
            AugmentationRule("x", 0, (), Effects(foreground="red"))

    def test_byte_offsets_with_multibyte_text(self):
        text = "héllo F1001 wörld"
        spans = spans_for(text, builtin_ruleset("identifier_overlay", {"F1001": "Field"}))
        overlay = spans[-1]
        raw = text.encode("utf-8")
        assert raw[overlay.span.start:overlay.span.end] == b"F1001"

    def test_fragment_concatenation_property(self):
        rng = random.Random(31)
        alphabet = "ab\ncd \n"
        for _ in range(50):
            text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(1, 40)))
            spans = spans_for(text, [rule("r", "a", foreground="red",
                                          kind=MatcherKind.LITERAL)])
            src = SourceText(text)
            for s in spans:
                assert "".join(src.slice(f) for f in s.line_fragments) == src.slice(s.span)

    def test_output_sorted_by_start_then_priority_then_rule_id(self):
        rules = [rule("bb", "yy", priority=1, foreground="red"),
                 rule("aa", "yy", priority=1, font_style="italic"),
                 rule("cc", "yy", priority=9, background="black"),
                 rule("dd", "xx", priority=0, foreground="blue")]
        spans = spans_for("xx yy", rules)
        keys = [(s.span.start, -s.priority, s.rule_id) for s in spans]
        assert keys == sorted(keys)
        assert [s.rule_id for s in spans] == ["dd", "cc", "aa", "bb"]

    def test_stage_partition_rule_with_all_channel_groups(self):
        rules = [rule("everything", "hit", foreground="white", overlay_text="HIT",
                      decoration=Decoration(DecorationShape.BOX, "red"), tooltip="tip")]
        spans = spans_for("a hit b", rules)
        stages = {s.stage for s in spans}
        assert stages == {Stage.INLINE, Stage.BACKGROUND}
        inline = [s for s in spans if s.stage is Stage.INLINE][0]
        background = [s for s in spans if s.stage is Stage.BACKGROUND][0]
        assert inline.effects.overlay_text == "HIT"
        assert inline.effects.foreground == "white"
        assert background.effects.tooltip == "tip"  # tooltip rides the decorated span
        assert background.effects.decoration is not None


class TestOracleEquivalence:
    ALPHABET = "abc xy\n\"'01:#$\\."
    WORDS = ["self", "foo:", "42", "nil", "#a", ":x", "'s'", '"c"', "ab"]

    def random_rules(self, rng) -> list[AugmentationRule]:
        rules = []
        for i in range(rng.randrange(1, 8)):
            if rng.random() < 0.5:
                matcher = Matcher(MatcherKind.LITERAL, rng.choice(self.WORDS))
            else:
                matcher = Matcher(MatcherKind.REGEX, rng.choice(
                    [r"\b\d+\b", r"\w+:", r"[$#]\w+", r"'(.|\n)*?'", r"a+b?"]))
            channels = {}
            if rng.random() < 0.7:
                channels["foreground"] = rng.choice(["red", "blue", "green"])
            if rng.random() < 0.3:
                channels["font_weight"] = "bold"
            if rng.random() < 0.25:
                channels["overlay_text"] = f"OV{i}"
            if rng.random() < 0.25:
                channels["tooltip"] = f"tip{i}"
            if rng.random() < 0.2:
                channels["decoration"] = Decoration(DecorationShape.UNDERLINE_SQUIGGLE,
                                                    "red")
            if not channels:
                channels["background"] = "black"
            rules.append(AugmentationRule(f"rule-{i:02d}", rng.randrange(0, 4),
                                          (matcher,), Effects(**channels)))
        return rules

    def test_randomized_documents_match_oracle(self):
        rng = random.Random(2024)
        for round_no in range(60):
            text = "".join(rng.choice(self.ALPHABET)
                           for _ in range(rng.randrange(0, 200)))
            rules = self.random_rules(rng)
            got = engine_span_tuples(spans_for(text, rules))
            want = oracle_spans(text, rules)
            assert got == want, f"divergence in round {round_no}"


class TestTaxonomy:
    def test_sha1_rule_coverage(self):
        matrix = taxonomy_coverage(builtin_ruleset("sha1_warning"))
        row = matrix["sha1-warning"]
        assert "graphics" in row["visualization"]
        assert "text" in row["visualization"]
        assert row["location"] == ["in-code"]
        assert "popover" in row["interaction"]

    def test_overlay_rule_coverage(self):
        matrix = taxonomy_coverage(builtin_ruleset("identifier_overlay", {"F1": "Field"}))
        row = matrix["overlay-F1"]
        assert "text" in row["visualization"]
        assert row["target"] == ["character-range"]

    def test_empty(self):
        assert taxonomy_coverage([]) == {}


class TestRulesetDocuments:
    def doc(self):
        return {
            "rules": [
                {"id": "warn", "priority": 3,
                 "matchers": [{"kind": "regex", "value": "danger"}],
                 "effects": {"decoration": {"shape": "box", "color": "red"},
                             "tooltip": "careful"},
                 "advice": "adv"},
                {"id": "plain", "priority": 1,
                 "matchers": [{"kind": "literal", "value": "x"}],
                 "effects": {"foreground": "#336699"}},
            ],
            "advice": [
                {"id": "adv", "title": "T", "message": "M",
                 "secure_action": {"label": "do", "sample_code": "nl()"},
                 "insecure_action": {"label": "ignore", "suppression_hint": "hide"},
                 "links": ["https://example.net/help"]},
            ],
        }

    def test_round_trip(self):
        ruleset = ruleset_from_json(self.doc())
        assert [r.id for r in ruleset.rules] == ["warn", "plain"]
        assert ruleset.advice["adv"].secure_action.sample_code == "nl()"
        spans = compute_spans(SourceText("danger x"), ruleset.rules, ruleset.advice)
        warn = [s for s in spans if s.rule_id == "warn"][0]
        assert warn.advice.title == "T"

    def test_duplicate_rule_id_rejected(self):
        doc = self.doc()
        doc["rules"][1]["id"] = "warn"
        with pytest.raises(RulesetError):
            ruleset_from_json(doc)

    def test_warning_rule_advice_needs_secure_action(self):
        doc = self.doc()
        doc["advice"][0].pop("secure_action")
        with pytest.raises(RulesetError):
            ruleset_from_json(doc)
