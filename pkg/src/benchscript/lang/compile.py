"""Compilation: parse plus static name/arity resolution.

Resolution rules: `fn` names are hoisted to the top of their enclosing block
(so recursion and mutual recursion work), `let` bindings are visible from
their statement to the end of the block, and function bodies see whatever was
visible at the definition site. Calls are always through a name; functions
are not values.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..diagnostics import Diagnostic, Severity, SourceText, as_source
from ..sandbox import Capability
from . import ast
from .parser import parse


@dataclass(frozen=True)
class BuiltinSig:
    name: str
    arity: int
    pure: bool
    capability: Capability | None = None


BUILTINS: dict[str, BuiltinSig] = {
    sig.name: sig
    for sig in (
        BuiltinSig("print", 1, pure=False, capability=Capability.CONSOLE_WRITE),
        BuiltinSig("nl", 0, pure=True),
        BuiltinSig("concat", 2, pure=True),
        BuiltinSig("len", 1, pure=True),
        BuiltinSig("hash_sha1", 1, pure=True, capability=Capability.HASHING),
        BuiltinSig("hash_sha512", 1, pure=True, capability=Capability.HASHING),
        BuiltinSig("read_file", 1, pure=False, capability=Capability.FILE_READ),
        BuiltinSig("write_file", 2, pure=False, capability=Capability.FILE_WRITE),
    )
}

PURE_BUILTINS = frozenset(name for name, sig in BUILTINS.items() if sig.pure)


class _Scope:
    __slots__ = ("parent", "vars", "fns")

    def __init__(self, parent: "_Scope | None"):
        self.parent = parent
        self.vars: set[str] = set()
        self.fns: dict[str, ast.FnDef] = {}

    def declared_here(self, name: str) -> bool:
        return name in self.vars or name in self.fns

    def lookup_var(self, name: str) -> bool:
        scope: _Scope | None = self
        while scope is not None:
            if name in scope.vars:
                return True
            if name in scope.fns:
                return False  # shadowed by a function; not a variable
            scope = scope.parent
        return False

    def lookup_fn(self, name: str) -> ast.FnDef | None:
        scope: _Scope | None = self
        while scope is not None:
            if name in scope.vars:
                return None
            if name in scope.fns:
                return scope.fns[name]
            scope = scope.parent
        return None

    def resolves(self, name: str) -> bool:
        scope: _Scope | None = self
        while scope is not None:
            if name in scope.vars or name in scope.fns:
                return True
            scope = scope.parent
        return False


class _Resolver:
    def __init__(self) -> None:
        self.diags: list[Diagnostic] = []

    def err(self, code: str, message: str, span) -> None:
        self.diags.append(Diagnostic(code, Severity.ERROR, message, span))

    def resolve_block(self, statements: tuple[ast.Node, ...], scope: _Scope) -> None:
        for stmt in statements:  # hoist functions first
            if isinstance(stmt, ast.FnDef):
                if scope.declared_here(stmt.name):
                    self.err("P012", f"duplicate declaration of {stmt.name!r}", stmt.name_span)
                else:
                    scope.fns[stmt.name] = stmt
        for stmt in statements:
            self.statement(stmt, scope)

    def statement(self, stmt: ast.Node, scope: _Scope) -> None:
        if isinstance(stmt, ast.LetStmt):
            self.expr(stmt.value, scope)
            if stmt.name in scope.vars or stmt.name in scope.fns:
                self.err("P012", f"duplicate declaration of {stmt.name!r}", stmt.name_span)
            scope.vars.add(stmt.name)
        elif isinstance(stmt, ast.AssignStmt):
            self.expr(stmt.value, scope)
            if not scope.resolves(stmt.name):
                self.err("P010", f"unresolved identifier {stmt.name!r}", stmt.name_span)
            elif not scope.lookup_var(stmt.name):
                self.err("P015", f"{stmt.name!r} is not an assignable variable", stmt.name_span)
        elif isinstance(stmt, ast.IfStmt):
            self.expr(stmt.cond, scope)
            self.resolve_block(stmt.then_block.statements, _Scope(scope))
            if isinstance(stmt.else_branch, ast.Block):
                self.resolve_block(stmt.else_branch.statements, _Scope(scope))
            elif isinstance(stmt.else_branch, ast.IfStmt):
                self.statement(stmt.else_branch, scope)
        elif isinstance(stmt, ast.WhileStmt):
            self.expr(stmt.cond, scope)
            self.resolve_block(stmt.body.statements, _Scope(scope))
        elif isinstance(stmt, ast.FnDef):
            body_scope = _Scope(scope)
            for param in stmt.params:
                if param.name in body_scope.vars:
                    self.err("P012", f"duplicate parameter {param.name!r}", param.span)
                body_scope.vars.add(param.name)
            self.resolve_block(stmt.body.statements, body_scope)
        elif isinstance(stmt, ast.ReturnStmt):
            if stmt.value is not None:
                self.expr(stmt.value, scope)
        elif isinstance(stmt, ast.ExprStmt):
            self.expr(stmt.expr, scope)

    def expr(self, node: ast.Node, scope: _Scope) -> None:
        if isinstance(node, ast.Ident):
            if not scope.resolves(node.name):
                self.err("P010", f"unresolved identifier {node.name!r}", node.span)
            elif not scope.lookup_var(node.name):
                self.err("P015", f"{node.name!r} is a function, not a value", node.span)
        elif isinstance(node, ast.Call):
            for arg in node.args:
                self.expr(arg, scope)
            fn = scope.lookup_fn(node.callee)
            if fn is not None:
                if len(node.args) != len(fn.params):
                    self.err("P013",
                             f"{node.callee!r} takes {len(fn.params)} argument(s), "
                             f"got {len(node.args)}", node.callee_span)
                return
            if scope.resolves(node.callee):
                self.err("P014", f"{node.callee!r} is not a function", node.callee_span)
                return
            sig = BUILTINS.get(node.callee)
            if sig is None:
                self.err("P010", f"unresolved identifier {node.callee!r}", node.callee_span)
            elif len(node.args) != sig.arity:
                self.err("P011",
                         f"builtin {node.callee!r} takes {sig.arity} argument(s), "
                         f"got {len(node.args)}", node.callee_span)
        elif isinstance(node, (ast.Binary, ast.Unary, ast.IfExpr)):
            for child in node.children():
                self.expr(child, scope)
        # literals need no resolution


def compile_text(text: SourceText | str) -> tuple[list[Diagnostic], ast.Program | None]:
    """Compile; on any error diagnostic the tree is withheld.

    Deterministic: diagnostics come back sorted by (span start, code).
    """
    src = as_source(text)
    program, diags = parse(src)
    resolver = _Resolver()
    resolver.resolve_block(program.statements, _Scope(None))
    all_diags = sorted(diags + resolver.diags, key=lambda d: (d.span.start, d.code))
    if any(d.severity is Severity.ERROR for d in all_diags):
        return all_diags, None
    return all_diags, program
