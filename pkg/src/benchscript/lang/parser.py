"""Recursive-descent parser for BenchScript.

Syntax errors become P002 diagnostics; the parser recovers at statement
boundaries (`;` or `}`) and keeps going, so one pass can report several
problems. `if` doubles as the ternary equivalent in expression position:
`let m = if (a > b) a else b;`
"""

from __future__ import annotations

from ..diagnostics import Diagnostic, Severity, SourceText, Span, as_source
from . import ast
from .lexer import Token, TokenKind, lex


class _ParseError(Exception):
    pass


class Parser:
    def __init__(self, src: SourceText, tokens: list[Token]):
        self.src = src
        self.tokens = tokens
        self.pos = 0
        self.diags: list[Diagnostic] = []
        eof_at = src.byte_length
        line, col = src.line_col_of_char(len(src.content))
        self._eof = Token(TokenKind.EOF, "", Span(eof_at, eof_at, line, col))

    # -- token plumbing --------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        idx = self.pos + ahead
        return self.tokens[idx] if idx < len(self.tokens) else self._eof

    def advance(self) -> Token:
        tok = self.peek()
        if self.pos < len(self.tokens):
            self.pos += 1
        return tok

    def at(self, kind: TokenKind, text: str | None = None) -> bool:
        tok = self.peek()
        return tok.kind is kind and (text is None or tok.text == text)

    def expect(self, kind: TokenKind, text: str | None = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        tok = self.peek()
        wanted = text if text is not None else kind.value
        found = tok.text if tok.kind is not TokenKind.EOF else "end of input"
        self.error(f"expected {wanted!r}, found {found!r}", tok.span)
        raise _ParseError

    def error(self, message: str, span: Span) -> None:
        self.diags.append(Diagnostic("P002", Severity.ERROR, message, span))

    def synchronize(self) -> None:
        while not self.at(TokenKind.EOF):
            tok = self.advance()
            if tok.kind is TokenKind.PUNCT and tok.text in (";", "}"):
                return

    def span_from(self, start: Span) -> Span:
        end = self.tokens[self.pos - 1].span.end if self.pos > 0 else start.end
        return Span(start.start, max(end, start.start), start.line, start.column)

    # -- grammar ---------------------------------------------------------

    def parse_program(self) -> ast.Program:
        statements: list[ast.Node] = []
        while not self.at(TokenKind.EOF):
            before = self.pos
            try:
                statements.append(self.statement())
            except _ParseError:
                self.synchronize()
                if self.pos == before:  # guarantee progress
                    self.advance()
        whole = self.src.span_of_chars(0, len(self.src.content))
        return ast.Program(whole, tuple(statements))

    def statement(self) -> ast.Node:
        tok = self.peek()
        if tok.kind is TokenKind.KEYWORD:
            if tok.text == "let":
                return self.let_statement()
            if tok.text == "if":
                return self.if_statement()
            if tok.text == "while":
                return self.while_statement()
            if tok.text == "fn":
                return self.fn_definition()
            if tok.text == "return":
                return self.return_statement()
        if tok.kind is TokenKind.IDENT and self.peek(1).kind is TokenKind.PUNCT \
                and self.peek(1).text == "=":
            return self.assign_statement()
        expr = self.expression()
        self.expect(TokenKind.PUNCT, ";")
        return ast.ExprStmt(self.span_from(expr.span), expr)

    def let_statement(self) -> ast.LetStmt:
        start = self.advance().span
        name = self.expect(TokenKind.IDENT)
        self.expect(TokenKind.PUNCT, "=")
        value = self.expression()
        self.expect(TokenKind.PUNCT, ";")
        return ast.LetStmt(self.span_from(start), name.text, name.span, value)

    def assign_statement(self) -> ast.AssignStmt:
        name = self.advance()
        self.advance()  # '='
        value = self.expression()
        self.expect(TokenKind.PUNCT, ";")
        return ast.AssignStmt(self.span_from(name.span), name.text, name.span, value)

    def if_statement(self) -> ast.IfStmt:
        start = self.advance().span
        self.expect(TokenKind.PUNCT, "(")
        cond = self.expression()
        self.expect(TokenKind.PUNCT, ")")
        then_block = self.block()
        else_branch: ast.Node | None = None
        if self.at(TokenKind.KEYWORD, "else"):
            self.advance()
            if self.at(TokenKind.KEYWORD, "if"):
                else_branch = self.if_statement()
            else:
                else_branch = self.block()
        return ast.IfStmt(self.span_from(start), cond, then_block, else_branch)

    def while_statement(self) -> ast.WhileStmt:
        start = self.advance().span
        self.expect(TokenKind.PUNCT, "(")
        cond = self.expression()
        self.expect(TokenKind.PUNCT, ")")
        body = self.block()
        return ast.WhileStmt(self.span_from(start), cond, body)

    def fn_definition(self) -> ast.FnDef:
        start = self.advance().span
        name = self.expect(TokenKind.IDENT)
        self.expect(TokenKind.PUNCT, "(")
        params: list[ast.Param] = []
        if not self.at(TokenKind.PUNCT, ")"):
            while True:
                p = self.expect(TokenKind.IDENT)
                params.append(ast.Param(p.text, p.span))
                if self.at(TokenKind.PUNCT, ","):
                    self.advance()
                    continue
                break
        self.expect(TokenKind.PUNCT, ")")
        body = self.block()
        return ast.FnDef(self.span_from(start), name.text, name.span, tuple(params), body)

    def return_statement(self) -> ast.ReturnStmt:
        start = self.advance().span
        value: ast.Node | None = None
        if not self.at(TokenKind.PUNCT, ";"):
            value = self.expression()
        self.expect(TokenKind.PUNCT, ";")
        return ast.ReturnStmt(self.span_from(start), value)

    def block(self) -> ast.Block:
        open_tok = self.expect(TokenKind.PUNCT, "{")
        statements: list[ast.Node] = []
        while not self.at(TokenKind.PUNCT, "}") and not self.at(TokenKind.EOF):
            before = self.pos
            try:
                statements.append(self.statement())
            except _ParseError:
                self.synchronize()
                if self.pos == before:
                    self.advance()
        self.expect(TokenKind.PUNCT, "}")
        return ast.Block(self.span_from(open_tok.span), tuple(statements))

    # expressions, lowest precedence first

    def expression(self) -> ast.Node:
        if self.at(TokenKind.KEYWORD, "if"):
            return self.if_expression()
        return self.or_expr()

    def if_expression(self) -> ast.IfExpr:
        start = self.advance().span
        self.expect(TokenKind.PUNCT, "(")
        cond = self.expression()
        self.expect(TokenKind.PUNCT, ")")
        then_expr = self.expression()
        self.expect(TokenKind.KEYWORD, "else")
        else_expr = self.expression()
        return ast.IfExpr(self.span_from(start), cond, then_expr, else_expr)

    def _binary_left(self, ops: tuple[str, ...], sub) -> ast.Node:
        left = sub()
        while self.peek().kind is TokenKind.PUNCT and self.peek().text in ops:
            op = self.advance().text
            right = sub()
            left = ast.Binary(self.span_from(left.span), op, left, right)
        return left

    def or_expr(self) -> ast.Node:
        return self._binary_left(("||",), self.and_expr)

    def and_expr(self) -> ast.Node:
        return self._binary_left(("&&",), self.equality)

    def equality(self) -> ast.Node:
        return self._binary_left(("==", "!="), self.comparison)

    def comparison(self) -> ast.Node:
        return self._binary_left(("<", "<=", ">", ">="), self.additive)

    def additive(self) -> ast.Node:
        return self._binary_left(("+", "-"), self.term)

    def term(self) -> ast.Node:
        return self._binary_left(("*", "/", "%"), self.unary)

    def unary(self) -> ast.Node:
        if self.peek().kind is TokenKind.PUNCT and self.peek().text in ("-", "!"):
            op_tok = self.advance()
            operand = self.unary()
            return ast.Unary(self.span_from(op_tok.span), op_tok.text, operand)
        return self.primary()

    def primary(self) -> ast.Node:
        tok = self.peek()
        if tok.kind is TokenKind.INT:
            self.advance()
            return ast.IntLit(tok.span, tok.int_value or 0)
        if tok.kind is TokenKind.KEYWORD and tok.text in ("true", "false"):
            self.advance()
            return ast.BoolLit(tok.span, tok.text == "true")
        if tok.kind is TokenKind.STRING:
            self.advance()
            return ast.StringLit(tok.span, tok.raw_body or "", tok.cooked or "")
        if tok.kind is TokenKind.IDENT:
            self.advance()
            if self.at(TokenKind.PUNCT, "("):
                return self.call(tok)
            return ast.Ident(tok.span, tok.text)
        if tok.kind is TokenKind.PUNCT and tok.text == "(":
            self.advance()
            expr = self.expression()
            self.expect(TokenKind.PUNCT, ")")
            return expr
        found = tok.text if tok.kind is not TokenKind.EOF else "end of input"
        self.error(f"unexpected token {found!r}", tok.span)
        raise _ParseError

    def call(self, callee: Token) -> ast.Call:
        self.advance()  # '('
        args: list[ast.Node] = []
        if not self.at(TokenKind.PUNCT, ")"):
            while True:
                args.append(self.expression())
                if self.at(TokenKind.PUNCT, ","):
                    self.advance()
                    continue
                break
        self.expect(TokenKind.PUNCT, ")")
        return ast.Call(self.span_from(callee.span), callee.text, callee.span, tuple(args))


def parse(text: SourceText | str) -> tuple[ast.Program, list[Diagnostic]]:
    """Lex then parse; returns the tree (possibly partial) plus all diagnostics."""
    src = as_source(text)
    tokens, lex_diags = lex(src)
    parser = Parser(src, tokens)
    program = parser.parse_program()
    return program, lex_diags + parser.diags
