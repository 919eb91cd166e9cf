"""Declarative visual augmentations: rules, matchers, effects, and spans.

A rule pairs matchers (literal strings or regular expressions, evaluated over
the whole document so patterns may cross lines) with effect channels. The
engine emits a rendering-agnostic span list in three stages mirroring an
editor pipeline: inline (overlay text replacing the displayed characters),
transform (colour and font changes), and background (decorations and gutter
glyphs drawn around the text). Span computation never touches the document.

Conflict policy, total and deterministic:
- matches of one matcher are leftmost non-overlapping; empty matches dropped;
- overlapping overlay spans: highest priority, then earliest start, wins and
  the losers are dropped entirely;
- two surviving spans covering the identical range and setting the same
  channel: the higher priority rule keeps it, ties broken by the later rule
  id; the loser's channel is cleared (spans left empty are dropped);
- output sorted by (start, -priority, rule id).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .diagnostics import SourceText, Span, as_source


class AugmentError(Exception):
    pass


class UnknownRulesetError(AugmentError):
    pass


class RulesetError(AugmentError):
    """Raised when a ruleset document is malformed."""


class MatcherKind(str, Enum):
    LITERAL = "literal"
    REGEX = "regex"


class Stage(str, Enum):
    INLINE = "inline"
    TRANSFORM = "transform"
    BACKGROUND = "background"


class DecorationShape(str, Enum):
    UNDERLINE_BRACKET = "underline_bracket"
    UNDERLINE_SQUIGGLE = "underline_squiggle"
    BOX = "box"


@dataclass(frozen=True)
class Matcher:
    kind: MatcherKind
    value: str


@dataclass(frozen=True)
class Decoration:
    shape: DecorationShape
    color: str

    def to_json(self) -> dict:
        return {"shape": self.shape.value, "color": self.color}


@dataclass(frozen=True)
class Gutter:
    side: str  # "left" | "right"
    glyph: str

    def to_json(self) -> dict:
        return {"side": self.side, "glyph": self.glyph}


_CHANNELS = ("foreground", "background", "font_style", "font_weight",
             "decoration", "tooltip", "overlay_text", "gutter")


@dataclass(frozen=True)
class Effects:
    foreground: str | None = None
    background: str | None = None
    font_style: str | None = None   # "normal" | "italic"
    font_weight: str | None = None  # "normal" | "bold"
    decoration: Decoration | None = None
    tooltip: str | None = None
    overlay_text: str | None = None
    gutter: Gutter | None = None

    def channels(self) -> tuple[str, ...]:
        return tuple(c for c in _CHANNELS if getattr(self, c) is not None)

    def is_empty(self) -> bool:
        return not self.channels()

    def to_json(self) -> dict:
        out: dict = {}
        for channel in self.channels():
            value = getattr(self, channel)
            out[channel] = value.to_json() if hasattr(value, "to_json") else value
        return out


@dataclass(frozen=True)
class AdviceAction:
    label: str
    sample_code: str | None = None        # secure action
    suppression_hint: str | None = None   # insecure action

    def to_json(self) -> dict:
        out: dict = {"label": self.label}
        if self.sample_code is not None:
            out["sample_code"] = self.sample_code
        if self.suppression_hint is not None:
            out["suppression_hint"] = self.suppression_hint
        return out


@dataclass(frozen=True)
class AdviceModel:
    id: str
    title: str
    message: str
    secure_action: AdviceAction | None = None
    insecure_action: AdviceAction | None = None
    links: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "message": self.message,
            "secure_action": self.secure_action.to_json() if self.secure_action else None,
            "insecure_action": self.insecure_action.to_json() if self.insecure_action else None,
            "links": list(self.links),
        }


@dataclass(frozen=True)
class AugmentationRule:
    id: str
    priority: int
    matchers: tuple[Matcher, ...]
    effects: Effects
    advice: str | None = None

    def __post_init__(self) -> None:
        if not self.matchers:
            raise RulesetError(f"rule {self.id!r} has no matchers")


@dataclass(frozen=True)
class AugmentationSpan:
    rule_id: str
    span: Span
    line_fragments: tuple[Span, ...]
    effects: Effects
    advice: AdviceModel | None
    stage: Stage
    priority: int = 0

    def to_json(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "span": self.span.to_json(),
            "line_fragments": [f.to_json() for f in self.line_fragments],
            "effects": self.effects.to_json(),
            "advice": self.advice.to_json() if self.advice else None,
            "stage": self.stage.value,
        }


@dataclass
class RuleProblem:
    rule_id: str
    kind: str
    message: str

    def to_json(self) -> dict:
        return {"rule_id": self.rule_id, "kind": self.kind, "message": self.message}


@dataclass
class Ruleset:
    rules: list[AugmentationRule] = field(default_factory=list)
    advice: dict[str, AdviceModel] = field(default_factory=dict)


# -- matching ------------------------------------------------------------


def _matcher_ranges(content: str, matcher: Matcher) -> list[tuple[int, int]]:
    """Leftmost non-overlapping char ranges; empty matches are discarded."""
    ranges: list[tuple[int, int]] = []
    if matcher.kind is MatcherKind.LITERAL:
        needle = matcher.value
        if not needle:
            return ranges
        pos = content.find(needle)
        while pos != -1:
            ranges.append((pos, pos + len(needle)))
            pos = content.find(needle, pos + len(needle))
        return ranges
    rx = re.compile(matcher.value)
    pos = 0
    while pos <= len(content):
        m = rx.search(content, pos)
        if m is None:
            break
        if m.end() > m.start():
            ranges.append((m.start(), m.end()))
            pos = m.end()
        else:
            pos = m.start() + 1
    return ranges


def _stage_effects(effects: Effects) -> list[tuple[Stage, Effects]]:
    """Partition a rule's channels into one effects bundle per pipeline stage.

    The tooltip (and any advice) rides on a single span: the background one
    when the rule decorates, else the inline one, else the transform one.
    """
    out: list[tuple[Stage, Effects]] = []
    has_background = effects.decoration is not None or effects.gutter is not None
    has_inline = effects.overlay_text is not None
    styled = Effects(foreground=effects.foreground, background=effects.background,
                     font_style=effects.font_style, font_weight=effects.font_weight)
    tooltip_stage = (Stage.BACKGROUND if has_background
                     else Stage.INLINE if has_inline
                     else Stage.TRANSFORM)

    if has_inline:
        out.append((Stage.INLINE, replace(
            styled, overlay_text=effects.overlay_text,
            tooltip=effects.tooltip if tooltip_stage is Stage.INLINE else None)))
    elif not styled.is_empty() or tooltip_stage is Stage.TRANSFORM:
        bundle = replace(styled,
                         tooltip=effects.tooltip if tooltip_stage is Stage.TRANSFORM else None)
        if not bundle.is_empty():
            out.append((Stage.TRANSFORM, bundle))
    if has_background:
        out.append((Stage.BACKGROUND, Effects(
            decoration=effects.decoration, gutter=effects.gutter,
            tooltip=effects.tooltip if tooltip_stage is Stage.BACKGROUND else None)))
    return out


def compute_spans(
    text: SourceText | str,
    rules: Iterable[AugmentationRule],
    advice_catalog: Mapping[str, AdviceModel] | None = None,
    problems: list[RuleProblem] | None = None,
) -> list[AugmentationSpan]:
    """Evaluate every rule over the whole document and emit resolved spans.

    Invalid patterns are reported into `problems` (when given) and the rule is
    skipped; the remaining rules still apply. Pure: same inputs, same output.
    """
    src = as_source(text)
    catalog = advice_catalog or {}
    candidates: list[AugmentationSpan] = []

    for rule in rules:
        ranges: set[tuple[int, int]] = set()
        bad = False
        for matcher in rule.matchers:
            try:
                ranges.update(_matcher_ranges(src.content, matcher))
            except re.error as exc:
                if problems is not None:
                    problems.append(RuleProblem(rule.id, "InvalidPattern", str(exc)))
                bad = True
                break
        if bad:
            continue
        advice = catalog.get(rule.advice) if rule.advice else None
        staged = _stage_effects(rule.effects)
        for cs, ce in sorted(ranges):
            span = src.span_of_chars(cs, ce)
            fragments = tuple(src.split_at_lines(span))
            for stage, effects in staged:
                candidates.append(AugmentationSpan(
                    rule.id, span, fragments, effects, advice, stage, rule.priority))

    survivors = _drop_losing_overlays(candidates)
    survivors = _resolve_same_range_channels(survivors)
    survivors.sort(key=lambda s: (s.span.start, -s.priority, s.rule_id, s.stage.value))
    return survivors


def _drop_losing_overlays(candidates: list[AugmentationSpan]) -> list[AugmentationSpan]:
    overlays = [s for s in candidates if s.effects.overlay_text is not None]
    overlays.sort(key=lambda s: (-s.priority, s.span.start, s.rule_id))
    kept: list[AugmentationSpan] = []
    dropped: set[int] = set()
    for span in overlays:
        clash = any(span.span.start < other.span.end and other.span.start < span.span.end
                    for other in kept)
        if clash:
            dropped.add(id(span))
        else:
            kept.append(span)
    return [s for s in candidates if id(s) not in dropped]


def _resolve_same_range_channels(spans: list[AugmentationSpan]) -> list[AugmentationSpan]:
    by_range: dict[tuple[int, int], list[int]] = {}
    for i, span in enumerate(spans):
        by_range.setdefault((span.span.start, span.span.end), []).append(i)

    out = list(spans)
    for indices in by_range.values():
        if len(indices) < 2:
            continue
        for channel in _CHANNELS:
            if channel == "overlay_text":
                continue  # overlays were resolved by the overlap pass
            setters = [i for i in indices
                       if getattr(out[i].effects, channel) is not None]
            if len({out[i].rule_id for i in setters}) < 2:
                continue
            winner = max(setters, key=lambda i: (out[i].priority, out[i].rule_id))
            for i in setters:
                if out[i].rule_id != out[winner].rule_id:
                    out[i] = replace(out[i], effects=replace(out[i].effects, **{channel: None}))
    return [s for s in out if not (s.effects.is_empty() and s.advice is None)]


# -- builtin rulesets ------------------------------------------------------

SHA1_TOOLTIP = ("SHA1 is cryptographically broken, please use a currently "
                "secure function like SHA-512.")

SHA1_ADVICE = AdviceModel(
    id="sha1-advice",
    title="Insecure hash function",
    message=SHA1_TOOLTIP,
    secure_action=AdviceAction(
        label="Switch to SHA-512",
        sample_code='let digest = hash_sha512("input");'),
    insecure_action=AdviceAction(
        label="Keep hash_sha1",
        suppression_hint="Keep the call only for interop with legacy systems "
                         "that cannot verify SHA-512 digests."),
    links=("https://shattered.io/",),
)

BUILTIN_ADVICE: dict[str, AdviceModel] = {SHA1_ADVICE.id: SHA1_ADVICE}

# Priorities climb in application order so that later layers win conflicts:
# keywords < messages < numbers/strings < symbols < parameters < comments.
_SMALLTALK_RULES = (
    ("st-keywords", 10, (Matcher(MatcherKind.REGEX, r"\b(self|super|true|false|nil)\b"),),
     Effects(foreground="royalblue", font_weight="bold")),
    ("st-messages", 20, (Matcher(MatcherKind.REGEX, r"\w+:"),),
     Effects(foreground="orange")),
    ("st-numbers-and-strings", 30,
     (Matcher(MatcherKind.REGEX, r"\b\d+(\.\d+)?\b"),
      Matcher(MatcherKind.REGEX, r"'((.|\r|\n)*?)'")),
     Effects(foreground="mediumaquamarine")),
    ("st-symbols", 40, (Matcher(MatcherKind.REGEX, r"[$#]\w+"),),
     Effects(foreground="darkred", font_weight="bold")),
    ("st-parameters", 50, (Matcher(MatcherKind.REGEX, r":\w+"),),
     Effects(font_weight="bold")),
    ("st-comments", 60, (Matcher(MatcherKind.REGEX, '"(.|\\r|\\n)*?"'),),
     Effects(foreground="lightgreen", font_style="italic")),
)


def builtin_ruleset(name: str, params: Mapping[str, str] | None = None) -> list[AugmentationRule]:
    """Return one of the built-in rulesets.

    smalltalk            six syntax-highlighting rules
    sha1_warning         red bracket underline + tooltip + advice on hash_sha1 calls
    identifier_overlay   params map identifiers to the display names overlaid on them
    """
    if name == "smalltalk":
        return [AugmentationRule(rid, prio, matchers, effects)
                for rid, prio, matchers, effects in _SMALLTALK_RULES]
    if name == "sha1_warning":
        return [AugmentationRule(
            id="sha1-warning",
            priority=100,
            matchers=(Matcher(MatcherKind.REGEX, r"\bhash_sha1\s*\("),),
            effects=Effects(
                decoration=Decoration(DecorationShape.UNDERLINE_BRACKET, "red"),
                tooltip=SHA1_TOOLTIP),
            advice=SHA1_ADVICE.id,
        )]
    if name == "identifier_overlay":
        if not params:
            raise RulesetError("identifier_overlay needs an identifier-to-name mapping")
        return [AugmentationRule(
            id=f"overlay-{ident}",
            priority=50,
            matchers=(Matcher(MatcherKind.LITERAL, ident),),
            effects=Effects(background="darkgray", foreground="white",
                            overlay_text=display),
        ) for ident, display in params.items()]
    raise UnknownRulesetError(f"unknown builtin ruleset: {name!r}")


# -- taxonomy reporting ------------------------------------------------------

_DIMENSIONS = ("visualization", "location", "target", "interaction")


def taxonomy_coverage(rules: Iterable[AugmentationRule]) -> dict[str, dict[str, list[str]]]:
    """Report which visual-augmentation taxonomy attributes each rule exercises.

    Dimensions: visualization (colour/text/icon/graphics), location
    (in-code/left/right), target (character-range), interaction
    (popover/navigation). A documentation aid, not load-bearing.
    """
    matrix: dict[str, dict[str, list[str]]] = {}
    for rule in rules:
        e = rule.effects
        vis: set[str] = set()
        loc: set[str] = set()
        inter: set[str] = set()
        if e.foreground or e.background:
            vis.add("colour")
        if e.tooltip or e.overlay_text:
            vis.add("text")
        if e.gutter:
            vis.add("icon")
            loc.add(e.gutter.side)
        if e.decoration:
            vis.add("graphics")
        if e.foreground or e.background or e.font_style or e.font_weight \
                or e.decoration or e.overlay_text or e.tooltip:
            loc.add("in-code")
        if e.tooltip or rule.advice:
            inter.add("popover")
        if rule.advice:
            inter.add("navigation")
        matrix[rule.id] = {
            "visualization": sorted(vis),
            "location": sorted(loc),
            "target": ["character-range"],
            "interaction": sorted(inter),
        }
    return matrix


# -- ruleset documents ---------------------------------------------------


def _effects_from_json(doc: dict) -> Effects:
    deco = doc.get("decoration")
    gutter = doc.get("gutter")
    try:
        return Effects(
            foreground=doc.get("foreground"),
            background=doc.get("background"),
            font_style=doc.get("font_style"),
            font_weight=doc.get("font_weight"),
            decoration=Decoration(DecorationShape(deco["shape"]), deco["color"])
            if deco else None,
            tooltip=doc.get("tooltip"),
            overlay_text=doc.get("overlay_text"),
            gutter=Gutter(gutter["side"], gutter["glyph"]) if gutter else None,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise RulesetError(f"malformed effects: {exc}") from None


def _advice_from_json(doc: dict) -> AdviceModel:
    def action(key: str) -> AdviceAction | None:
        raw = doc.get(key)
        if raw is None:
            return None
        return AdviceAction(raw["label"], raw.get("sample_code"), raw.get("suppression_hint"))

    try:
        return AdviceModel(doc["id"], doc.get("title", ""), doc.get("message", ""),
                           action("secure_action"), action("insecure_action"),
                           tuple(doc.get("links", [])))
    except (KeyError, TypeError) as exc:
        raise RulesetError(f"malformed advice model: {exc}") from None


def ruleset_from_json(doc: dict) -> Ruleset:
    if not isinstance(doc, dict):
        raise RulesetError("ruleset document must be a JSON object")
    ruleset = Ruleset()
    for advice_doc in doc.get("advice", []):
        model = _advice_from_json(advice_doc)
        ruleset.advice[model.id] = model
    seen: set[str] = set()
    for rule_doc in doc.get("rules", []):
        try:
            rule = AugmentationRule(
                id=rule_doc["id"],
                priority=int(rule_doc.get("priority", 0)),
                matchers=tuple(Matcher(MatcherKind(m["kind"]), m["value"])
                               for m in rule_doc["matchers"]),
                effects=_effects_from_json(rule_doc.get("effects", {})),
                advice=rule_doc.get("advice"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise RulesetError(f"malformed rule: {exc}") from None
        if rule.id in seen:
            raise RulesetError(f"duplicate rule id {rule.id!r}")
        seen.add(rule.id)
        if rule.effects.decoration is not None and rule.advice is not None:
            model = ruleset.advice.get(rule.advice, BUILTIN_ADVICE.get(rule.advice))
            if model is not None and model.secure_action is None:
                raise RulesetError(
                    f"advice {rule.advice!r} on warning rule {rule.id!r} "
                    "needs a secure_action")
        ruleset.rules.append(rule)
    return ruleset


def load_ruleset_file(path: str | Path) -> Ruleset:
    with open(path, encoding="utf-8") as fh:
        return ruleset_from_json(json.load(fh))
