from __future__ import annotations

import random

from benchscript.diagnostics import SourceText
from benchscript.lang import TokenKind, escape, lex, unescape


def kinds(tokens):
    return [(t.kind, t.text) for t in tokens]


def test_string_escape_resolution():
    tokens, diags = lex('"a\\nb"')
    assert diags == []
    assert len(tokens) == 1
    tok = tokens[0]
    assert tok.kind is TokenKind.STRING
    assert tok.cooked == "a\nb"
    assert tok.raw_body == "a\\nb"


def test_misspelled_keyword_stays_identifier():
    tokens, diags = lex("retrn 1;")
    assert diags == []
    assert kinds(tokens) == [(TokenKind.IDENT, "retrn"), (TokenKind.INT, "1"),
                             (TokenKind.PUNCT, ";")]
    assert tokens[1].int_value == 1


def test_empty_input():
    assert lex("") == ([], [])


def test_unknown_character_reported_and_skipped():
    tokens, diags = lex("let @ x")
    assert [d.code for d in diags] == ["P001"]
    assert kinds(tokens) == [(TokenKind.KEYWORD, "let"), (TokenKind.IDENT, "x")]


def test_all_escapes():
    tokens, diags = lex('"\\n\\t\\\\\\""')
    assert diags == []
    assert tokens[0].cooked == '\n\t\\"'


def test_invalid_escape():
    tokens, diags = lex('"a\\qb"')
    assert [d.code for d in diags] == ["P004"]


def test_unterminated_string():
    tokens, diags = lex('"abc')
    assert [d.code for d in diags] == ["P003"]
    tokens, diags = lex('"abc\nx;')
    assert "P003" in [d.code for d in diags]


def test_int_too_large():
    _, diags = lex("9223372036854775808;")
    assert [d.code for d in diags] == ["P005"]
    _, diags = lex("9223372036854775807;")
    assert diags == []


def test_comments_skipped():
    tokens, diags = lex("1 // comment ; let\n2")
    assert diags == []
    assert [t.text for t in tokens] == ["1", "2"]


def test_two_char_operators():
    tokens, _ = lex("== != <= >= && || < > = !")
    assert [t.text for t in tokens] == ["==", "!=", "<=", ">=", "&&", "||",
                                        "<", ">", "=", "!"]


def test_spans_are_byte_offsets():
    src = SourceText('let s = "é";')
    tokens, _ = lex(src)
    string_tok = [t for t in tokens if t.kind is TokenKind.STRING][0]
    assert src.content.encode("utf-8")[string_tok.span.start:string_tok.span.end] \
        == '"é"'.encode("utf-8")


def test_escape_round_trip_property():
    rng = random.Random(1234)
    alphabet = "ab\n\t\\\"xyz 0"
    for _ in range(300):
        cooked = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 12)))
        raw = escape(cooked)
        # un-escaping then re-escaping raw text reproduces it
        assert escape(unescape(raw)) == raw
        assert unescape(raw) == cooked
        tokens, diags = lex(f'"{raw}"')
        assert diags == []
        assert tokens[0].cooked == cooked
