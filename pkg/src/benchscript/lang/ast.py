"""Syntax tree nodes. Every node carries a byte-offset span.

The `kind` strings are the subscription keys used by analyzer rules.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..diagnostics import Span


@dataclass(frozen=True)
class Node:
    span: Span

    kind = "node"

    def children(self) -> tuple["Node", ...]:
        return ()


@dataclass(frozen=True)
class Program(Node):
    statements: tuple[Node, ...]

    kind = "program"

    def children(self):
        return self.statements


@dataclass(frozen=True)
class Block(Node):
    statements: tuple[Node, ...]

    kind = "block"

    def children(self):
        return self.statements


@dataclass(frozen=True)
class LetStmt(Node):
    name: str
    name_span: Span
    value: Node

    kind = "let"

    def children(self):
        return (self.value,)


@dataclass(frozen=True)
class AssignStmt(Node):
    name: str
    name_span: Span
    value: Node

    kind = "assign"

    def children(self):
        return (self.value,)


@dataclass(frozen=True)
class IfStmt(Node):
    cond: Node
    then_block: Block
    else_branch: Node | None  # Block or a chained IfStmt

    kind = "if"

    def children(self):
        kids = (self.cond, self.then_block)
        return kids + ((self.else_branch,) if self.else_branch is not None else ())


@dataclass(frozen=True)
class WhileStmt(Node):
    cond: Node
    body: Block

    kind = "while"

    def children(self):
        return (self.cond, self.body)


@dataclass(frozen=True)
class Param:
    name: str
    span: Span


@dataclass(frozen=True)
class FnDef(Node):
    name: str
    name_span: Span
    params: tuple[Param, ...]
    body: Block

    kind = "fn"

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class ReturnStmt(Node):
    value: Node | None

    kind = "return"

    def children(self):
        return (self.value,) if self.value is not None else ()


@dataclass(frozen=True)
class ExprStmt(Node):
    expr: Node

    kind = "expr_stmt"

    def children(self):
        return (self.expr,)


@dataclass(frozen=True)
class IntLit(Node):
    value: int

    kind = "int_literal"


@dataclass(frozen=True)
class BoolLit(Node):
    value: bool

    kind = "bool_literal"


@dataclass(frozen=True)
class StringLit(Node):
    raw: str     # body as typed, quotes stripped
    cooked: str  # escapes resolved

    kind = "string_literal"


@dataclass(frozen=True)
class Ident(Node):
    name: str

    kind = "identifier"


@dataclass(frozen=True)
class Call(Node):
    callee: str
    callee_span: Span
    args: tuple[Node, ...]

    kind = "call"

    def children(self):
        return self.args


@dataclass(frozen=True)
class Binary(Node):
    op: str
    left: Node
    right: Node

    kind = "binary"

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Unary(Node):
    op: str
    operand: Node

    kind = "unary"

    def children(self):
        return (self.operand,)


@dataclass(frozen=True)
class IfExpr(Node):
    cond: Node
    then_expr: Node
    else_expr: Node

    kind = "if_expr"

    def children(self):
        return (self.cond, self.then_expr, self.else_expr)


def walk(node: Node):
    """Depth-first pre-order traversal."""
    yield node
    for child in node.children():
        yield from walk(child)


SyntaxTree = Program
