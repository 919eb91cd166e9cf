"""Lexer for BenchScript.

Tokenization never aborts: unknown characters, bad escapes, and unterminated
strings all become diagnostics and lexing continues. String tokens keep both
the raw body (as typed, quotes stripped) and the cooked value with escapes
resolved.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..diagnostics import Diagnostic, Severity, SourceText, Span, as_source

INT64_MAX = 2**63 - 1
INT64_MIN = -(2**63)

KEYWORDS = frozenset({"let", "if", "else", "while", "fn", "return", "true", "false"})

TWO_CHAR_OPS = ("==", "!=", "<=", ">=", "&&", "||")
ONE_CHAR = "+-*/%<>!=(){},;"

ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", '"': '"'}
UNESCAPES = {v: k for k, v in ESCAPES.items()}


class TokenKind(str, Enum):
    INT = "int"
    STRING = "string"
    IDENT = "ident"
    KEYWORD = "keyword"
    PUNCT = "punct"
    EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: Span
    int_value: int | None = None
    cooked: str | None = None
    raw_body: str | None = None


def unescape(raw: str) -> str:
    """Resolve the escape sequences \\n \\t \\\\ \\" in a raw string body."""
    out: list[str] = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\" and i + 1 < len(raw) and raw[i + 1] in ESCAPES:
            out.append(ESCAPES[raw[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def escape(cooked: str) -> str:
    """Inverse of :func:`unescape` for values containing only escapable chars."""
    return "".join("\\" + UNESCAPES[ch] if ch in UNESCAPES else ch for ch in cooked)


def lex(text: SourceText | str) -> tuple[list[Token], list[Diagnostic]]:
    src = as_source(text)
    content = src.content
    tokens: list[Token] = []
    diags: list[Diagnostic] = []
    i = 0
    n = len(content)

    def span(cs: int, ce: int) -> Span:
        return src.span_of_chars(cs, ce)

    while i < n:
        ch = content[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch == "/" and i + 1 < n and content[i + 1] == "/":
            while i < n and content[i] != "\n":
                i += 1
            continue

        start = i
        if ch.isdigit():
            while i < n and content[i].isdigit():
                i += 1
            lexeme = content[start:i]
            value = int(lexeme)
            if value > INT64_MAX:
                diags.append(Diagnostic("P005", Severity.ERROR,
                                        f"integer literal {lexeme} exceeds the 64-bit range",
                                        span(start, i)))
                value = 0
            tokens.append(Token(TokenKind.INT, lexeme, span(start, i), int_value=value))
            continue

        if ch.isalpha() or ch == "_":
            while i < n and (content[i].isalnum() or content[i] == "_"):
                i += 1
            lexeme = content[start:i]
            kind = TokenKind.KEYWORD if lexeme in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, lexeme, span(start, i)))
            continue

        if ch == '"':
            i += 1
            body_start = i
            terminated = False
            while i < n:
                c = content[i]
                if c == '"':
                    terminated = True
                    break
                if c == "\n":
                    break
                if c == "\\":
                    if i + 1 < n and content[i + 1] not in ("\n",):
                        if content[i + 1] not in ESCAPES:
                            diags.append(Diagnostic(
                                "P004", Severity.ERROR,
                                f"invalid escape sequence \\{content[i + 1]}",
                                span(i, i + 2)))
                        i += 2
                        continue
                i += 1
            raw = content[body_start:i]
            if terminated:
                i += 1
            else:
                diags.append(Diagnostic("P003", Severity.ERROR,
                                        "unterminated string literal", span(start, i)))
            tokens.append(Token(TokenKind.STRING, content[start:i], span(start, i),
                                cooked=unescape(raw), raw_body=raw))
            continue

        two = content[i:i + 2]
        if two in TWO_CHAR_OPS:
            i += 2
            tokens.append(Token(TokenKind.PUNCT, two, span(start, i)))
            continue
        if ch in ONE_CHAR:
            i += 1
            tokens.append(Token(TokenKind.PUNCT, ch, span(start, i)))
            continue

        diags.append(Diagnostic("P001", Severity.ERROR,
                                f"unknown character {ch!r}", span(i, i + 1)))
        i += 1

    return tokens, diags
