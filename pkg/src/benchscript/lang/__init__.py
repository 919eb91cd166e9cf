"""BenchScript: lexer, parser, compiler, and metered interpreter."""

from . import ast
from .compile import BUILTINS, PURE_BUILTINS, BuiltinSig, compile_text
from .interpreter import (
    UNIT,
    Fault,
    FaultKind,
    RunReport,
    Unit,
    Value,
    render_value,
    run,
    value_to_json,
)
from .lexer import Token, TokenKind, escape, lex, unescape
from .parser import parse

__all__ = [
    "ast",
    "BUILTINS",
    "PURE_BUILTINS",
    "BuiltinSig",
    "compile_text",
    "UNIT",
    "Fault",
    "FaultKind",
    "RunReport",
    "Unit",
    "Value",
    "render_value",
    "run",
    "value_to_json",
    "Token",
    "TokenKind",
    "escape",
    "lex",
    "unescape",
    "parse",
]
