"""Syntax-tree analyzers and automated code fixes.

Rules subscribe to specific node kinds; the engine walks the tree and only
invokes a rule on nodes it registered for. Built-in rules:

A001 (warning)  string literal whose cooked value contains a newline;
                fixed by routing the newline through the nl() builtin
A002 (warning)  call to hash_sha1; fixed by renaming the callee to hash_sha512
A003 (info)     expression statement discarding the result of a pure builtin

Fix edits address byte spans of the original text, are non-overlapping, and
preserve every byte outside the edited spans.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .augment import SHA1_TOOLTIP
from .diagnostics import Diagnostic, Severity, SourceText, Span, as_source
from .lang import ast
from .lang.compile import PURE_BUILTINS


class FixError(Exception):
    pass


class OverlappingEditsError(FixError):
    pass


class SpanOutOfRangeError(FixError):
    pass


@dataclass(frozen=True)
class AnalyzerRule:
    code: str
    severity: Severity
    node_kinds: frozenset[str]
    check: Callable[[ast.Node], Diagnostic | None]


@dataclass(frozen=True)
class TextEdit:
    span: Span
    replacement: str

    def to_json(self) -> dict:
        return {"span": self.span.to_json(), "replacement": self.replacement}


@dataclass(frozen=True)
class CodeFix:
    diagnostic_code: str
    title: str
    edits: tuple[TextEdit, ...]

    def to_json(self) -> dict:
        return {
            "diagnostic_code": self.diagnostic_code,
            "title": self.title,
            "edits": [e.to_json() for e in self.edits],
        }


@dataclass(frozen=True)
class FixResult:
    new_text: SourceText
    applied: CodeFix


def _check_newline_literal(node: ast.Node) -> Diagnostic | None:
    assert isinstance(node, ast.StringLit)
    if "\n" not in node.cooked:
        return None
    return Diagnostic("A001", Severity.WARNING,
                      "string literal contains a newline escape; build newlines "
                      "with the nl() builtin instead", node.span, fixable=True)


def _sha1_checker(severity: Severity) -> Callable[[ast.Node], Diagnostic | None]:
    def check(node: ast.Node) -> Diagnostic | None:
        assert isinstance(node, ast.Call)
        if node.callee != "hash_sha1":
            return None
        return Diagnostic("A002", severity, SHA1_TOOLTIP, node.callee_span, fixable=True)

    return check


def _check_discarded_result(node: ast.Node) -> Diagnostic | None:
    assert isinstance(node, ast.ExprStmt)
    expr = node.expr
    if not isinstance(expr, ast.Call) or expr.callee not in PURE_BUILTINS:
        return None
    return Diagnostic("A003", Severity.INFO,
                      f"the result of {expr.callee}() is ignored", node.span)


def builtin_rules(sha1_severity: Severity = Severity.WARNING) -> list[AnalyzerRule]:
    return [
        AnalyzerRule("A001", Severity.WARNING, frozenset({"string_literal"}),
                     _check_newline_literal),
        AnalyzerRule("A002", sha1_severity, frozenset({"call"}), _sha1_checker(sha1_severity)),
        AnalyzerRule("A003", Severity.INFO, frozenset({"expr_stmt"}),
                     _check_discarded_result),
    ]


def analyze(tree: ast.Program, text: SourceText | str,
            rules: Iterable[AnalyzerRule] | None = None) -> list[Diagnostic]:
    """Run every rule over the nodes it subscribed to, in document order."""
    del text  # positions already live on the tree; kept for signature parity
    active = list(rules) if rules is not None else builtin_rules()
    by_kind: dict[str, list[AnalyzerRule]] = {}
    for rule in active:
        for kind in rule.node_kinds:
            by_kind.setdefault(kind, []).append(rule)
    diagnostics: list[Diagnostic] = []
    for node in ast.walk(tree):
        for rule in by_kind.get(node.kind, ()):
            found = rule.check(node)
            if found is not None:
                diagnostics.append(found)
    diagnostics.sort(key=lambda d: (d.span.start, d.code))
    return diagnostics


def _split_raw_on_newline_escapes(raw: str) -> list[str]:
    """Split a raw string body at \\n escapes, leaving other escapes intact."""
    pieces: list[str] = []
    current: list[str] = []
    i = 0
    while i < len(raw):
        if raw[i] == "\\" and i + 1 < len(raw):
            if raw[i + 1] == "n":
                pieces.append("".join(current))
                current = []
            else:
                current.append(raw[i:i + 2])
            i += 2
        else:
            current.append(raw[i])
            i += 1
    pieces.append("".join(current))
    return pieces


def _newline_fix_expression(raw: str) -> str:
    parts: list[str] = []
    for i, piece in enumerate(_split_raw_on_newline_escapes(raw)):
        if i > 0:
            parts.append("nl()")
        if piece:
            parts.append(f'"{piece}"')
    return " + ".join(parts)


def fixes_for(diag: Diagnostic, text: SourceText | str) -> list[CodeFix]:
    """Offer the fixes available for one diagnostic; empty when unfixable."""
    src = as_source(text)
    if diag.code == "A001":
        literal = src.slice(diag.span)
        if len(literal) < 2 or not literal.startswith('"') or not literal.endswith('"'):
            return []
        replacement = _newline_fix_expression(literal[1:-1])
        return [CodeFix("A001", "Replace with compatible newlines",
                        (TextEdit(diag.span, replacement),))]
    if diag.code == "A002":
        return [CodeFix("A002", "Use hash_sha512",
                        (TextEdit(diag.span, "hash_sha512"),))]
    return []


def apply_fix(text: SourceText | str, fix: CodeFix) -> FixResult:
    """Apply edits right to left; bytes outside the edit spans are untouched."""
    src = as_source(text)
    edits = list(fix.edits)
    for i, edit in enumerate(edits):
        if edit.span.end > src.byte_length:
            raise SpanOutOfRangeError(
                f"edit [{edit.span.start}, {edit.span.end}) exceeds "
                f"{src.byte_length}-byte text")
        if i > 0 and edit.span.start < edits[i - 1].span.end:
            raise OverlappingEditsError("edits overlap or are not sorted by start")
    content = src.content
    for edit in reversed(edits):
        try:
            cs = src.char_of_byte(edit.span.start)
            ce = src.char_of_byte(edit.span.end)
        except ValueError as exc:
            raise SpanOutOfRangeError(str(exc)) from None
        content = content[:cs] + edit.replacement + content[ce:]
    return FixResult(SourceText(content), fix)
