"""Source text, byte-offset spans, and positioned diagnostics.

Spans address UTF-8 byte offsets into the document so that every consumer
(compiler, analyzers, augmentation engine, gateway JSON) agrees on positions
regardless of how the host language indexes strings. :class:`SourceText`
owns the char/byte conversion tables.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True)
class Span:
    """Half-open byte range [start, end) plus the 1-based line/column of start.

    Columns count characters within the line, not bytes.
    """

    start: int
    end: int
    line: int
    column: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"span start {self.start} > end {self.end}")

    def to_json(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "line": self.line,
            "column": self.column,
        }


@dataclass(frozen=True)
class Diagnostic:
    """A coded, positioned message.

    Codes are P-prefixed for lexer/parser/resolver problems, A-prefixed for
    analyzer rules, and R-prefixed for runtime faults rendered as diagnostics.
    """

    code: str
    severity: Severity
    message: str
    span: Span
    fixable: bool = False

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity.value,
            "message": self.message,
            "span": self.span.to_json(),
            "fixable": self.fixable,
        }


def is_error(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


class SourceText:
    """An immutable document with char-index <-> byte-offset conversion.

    The content is kept exactly as supplied (newline convention preserved).
    """

    def __init__(self, content: str):
        self.content = content
        self._byte_of_char: list[int] | None = None
        self._line_starts: list[int] | None = None  # char indices of line starts

    def __len__(self) -> int:
        return len(self.content)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SourceText):
            return self.content == other.content
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.content)

    def __repr__(self) -> str:
        preview = self.content[:40]
        return f"SourceText({preview!r}{'...' if len(self.content) > 40 else ''})"

    # -- offset tables -------------------------------------------------

    def _offsets(self) -> list[int]:
        if self._byte_of_char is None:
            table = [0]
            pos = 0
            for ch in self.content:
                pos += len(ch.encode("utf-8"))
                table.append(pos)
            self._byte_of_char = table
        return self._byte_of_char

    def _lines(self) -> list[int]:
        if self._line_starts is None:
            starts = [0]
            for i, ch in enumerate(self.content):
                if ch == "\n":
                    starts.append(i + 1)
            self._line_starts = starts
        return self._line_starts

    @property
    def byte_length(self) -> int:
        return self._offsets()[-1]

    def byte_of_char(self, char_index: int) -> int:
        return self._offsets()[char_index]

    def char_of_byte(self, byte_offset: int) -> int:
        """Map a byte offset back to a char index.

        Raises ValueError when the offset does not lie on a character boundary.
        """
        table = self._offsets()
        idx = bisect_right(table, byte_offset) - 1
        if idx < 0 or table[idx] != byte_offset:
            raise ValueError(f"byte offset {byte_offset} is not on a character boundary")
        return idx

    # -- span helpers ----------------------------------------------------

    def line_col_of_char(self, char_index: int) -> tuple[int, int]:
        starts = self._lines()
        line = bisect_right(starts, char_index) - 1
        return line + 1, char_index - starts[line] + 1

    def span_of_chars(self, char_start: int, char_end: int) -> Span:
        line, col = self.line_col_of_char(char_start)
        return Span(self.byte_of_char(char_start), self.byte_of_char(char_end), line, col)

    def slice(self, span: Span) -> str:
        return self.content[self.char_of_byte(span.start):self.char_of_byte(span.end)]

    def split_at_lines(self, span: Span) -> list[Span]:
        """Split a span into per-line fragments; newline chars stay with their line."""
        cs, ce = self.char_of_byte(span.start), self.char_of_byte(span.end)
        fragments: list[Span] = []
        frag_start = cs
        for i in range(cs, ce):
            if self.content[i] == "\n" and i + 1 < ce:
                fragments.append(self.span_of_chars(frag_start, i + 1))
                frag_start = i + 1
        fragments.append(self.span_of_chars(frag_start, ce))
        return fragments


def as_source(text: SourceText | str) -> SourceText:
    return text if isinstance(text, SourceText) else SourceText(text)
