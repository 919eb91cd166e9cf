"""Tree-walking interpreter with fuel, heap, output, and wall-clock metering.

Execution model:
- One step is one AST-node evaluation; the step budget (`max_steps`) is the
  hard termination guarantee, checked before every node.
- Heap cells meter live environment bindings: ints, bools, unit, and function
  bindings cost 1 cell, strings cost 1 + utf8-length // 64.
- Console output is byte-capped; the write that would exceed the cap is
  truncated to fit and execution halts with OutputLimitExceeded.
- The wall-clock limit is advisory (polled between steps); fuel remains the
  deterministic bound.

Faults halt execution but the report keeps the console captured so far.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass
from enum import Enum

from ..diagnostics import Diagnostic, Severity, SourceText, Span, as_source
from ..sandbox import (
    AccessMode,
    Capability,
    DenialReason,
    ExecutionPolicy,
    FsObject,
    VirtualFs,
    check_capability,
    check_fs_access,
)
from . import ast
from .compile import BUILTINS, compile_text

INT64_MAX = 2**63 - 1
INT64_MIN = -(2**63)


class Unit:
    """The unit value; a single shared instance stands for 'no value'."""

    _instance: "Unit | None" = None

    def __new__(cls) -> "Unit":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "unit"


UNIT = Unit()

Value = int | bool | str | Unit


def render_value(value: Value) -> str:
    """Console rendering: ints decimal, bools true/false, strings verbatim."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    return ""


def value_to_json(value: Value | None) -> dict | None:
    if value is None:
        return None
    if isinstance(value, bool):
        return {"type": "bool", "value": value}
    if isinstance(value, int):
        return {"type": "int", "value": value}
    if isinstance(value, str):
        return {"type": "string", "value": value}
    return {"type": "unit", "value": None}


def type_name(value: Value) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, int):
        return "int"
    if isinstance(value, str):
        return "string"
    return "unit"


class FaultKind(str, Enum):
    CAPABILITY_DENIED = "CapabilityDenied"
    ACL_DENIED = "AclDenied"
    INTEGRITY_DENIED = "IntegrityDenied"
    FUEL_EXHAUSTED = "FuelExhausted"
    MEMORY_EXCEEDED = "MemoryExceeded"
    OUTPUT_LIMIT_EXCEEDED = "OutputLimitExceeded"
    WALL_CLOCK_EXCEEDED = "WallClockExceeded"
    RUNTIME_ERROR = "RuntimeError"


_FAULT_CODES = {
    FaultKind.RUNTIME_ERROR: "R001",
    FaultKind.CAPABILITY_DENIED: "R010",
    FaultKind.ACL_DENIED: "R011",
    FaultKind.INTEGRITY_DENIED: "R012",
    FaultKind.FUEL_EXHAUSTED: "R020",
    FaultKind.MEMORY_EXCEEDED: "R021",
    FaultKind.OUTPUT_LIMIT_EXCEEDED: "R022",
    FaultKind.WALL_CLOCK_EXCEEDED: "R023",
}

_DENIAL_TO_FAULT = {
    DenialReason.CAPABILITY: FaultKind.CAPABILITY_DENIED,
    DenialReason.ACL: FaultKind.ACL_DENIED,
    DenialReason.INTEGRITY: FaultKind.INTEGRITY_DENIED,
}


@dataclass(frozen=True)
class Fault:
    kind: FaultKind
    message: str
    span: Span | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "message": self.message}

    def to_diagnostic(self) -> Diagnostic:
        span = self.span or Span(0, 0, 1, 1)
        return Diagnostic(_FAULT_CODES[self.kind], Severity.ERROR, self.message, span)


@dataclass(frozen=True)
class RunReport:
    compile_diagnostics: list[Diagnostic]
    console: str
    return_value: Value | None
    fault: Fault | None
    steps_used: int
    wall_ms: int

    def to_json(self) -> dict:
        return {
            "compile_diagnostics": [d.to_json() for d in self.compile_diagnostics],
            "console": self.console,
            "return_value": value_to_json(self.return_value),
            "fault": self.fault.to_json() if self.fault else None,
            "steps_used": self.steps_used,
            "wall_ms": self.wall_ms,
        }


class _FaultSignal(Exception):
    def __init__(self, fault: Fault):
        self.fault = fault


class _ReturnSignal(Exception):
    def __init__(self, value: Value):
        self.value = value


@dataclass(frozen=True)
class _Function:
    defn: ast.FnDef
    env: "_Env"


def _cells(value) -> int:
    if isinstance(value, str):
        return 1 + len(value.encode("utf-8")) // 64
    return 1


class _Env:
    __slots__ = ("parent", "vals", "meter")

    def __init__(self, parent: "_Env | None", meter: "_Meter"):
        self.parent = parent
        self.vals: dict[str, object] = {}
        self.meter = meter

    def bind(self, name: str, value, span: Span | None) -> None:
        old = self.vals.get(name)
        delta = _cells(value) - (_cells(old) if name in self.vals else 0)
        self.meter.charge_cells(delta, span)
        self.vals[name] = value

    def assign(self, name: str, value, span: Span | None) -> None:
        env: _Env | None = self
        while env is not None:
            if name in env.vals:
                delta = _cells(value) - _cells(env.vals[name])
                self.meter.charge_cells(delta, span)
                env.vals[name] = value
                return
            env = env.parent
        raise _FaultSignal(Fault(FaultKind.RUNTIME_ERROR,
                                 f"{name!r} assigned before initialization", span))

    def get(self, name: str, span: Span | None):
        env: _Env | None = self
        while env is not None:
            if name in env.vals:
                return env.vals[name]
            env = env.parent
        raise _FaultSignal(Fault(FaultKind.RUNTIME_ERROR,
                                 f"{name!r} used before initialization", span))

    def release(self) -> None:
        freed = sum(_cells(v) for v in self.vals.values())
        self.meter.live_cells -= freed
        self.vals.clear()


class _Meter:
    """Tracks fuel, live heap cells, console bytes, and the wall clock."""

    def __init__(self, policy: ExecutionPolicy, clock) -> None:
        self.limits = policy.limits
        self.steps = 0
        self.live_cells = 0
        self.console = bytearray()
        self.clock = clock
        self.started = clock()

    def step(self, span: Span | None) -> None:
        if self.steps >= self.limits.max_steps:
            raise _FaultSignal(Fault(FaultKind.FUEL_EXHAUSTED,
                                     f"step budget of {self.limits.max_steps} exhausted", span))
        self.steps += 1
        if self.steps % 256 == 0:
            elapsed_ms = (self.clock() - self.started) * 1000.0
            if elapsed_ms > self.limits.max_wall_ms:
                raise _FaultSignal(Fault(
                    FaultKind.WALL_CLOCK_EXCEEDED,
                    f"wall-clock budget of {self.limits.max_wall_ms} ms exceeded", span))

    def charge_cells(self, delta: int, span: Span | None) -> None:
        self.live_cells += delta
        if self.live_cells > self.limits.max_heap_cells:
            raise _FaultSignal(Fault(
                FaultKind.MEMORY_EXCEEDED,
                f"heap budget of {self.limits.max_heap_cells} cells exceeded", span))

    def write_console(self, text: str, span: Span | None) -> None:
        data = text.encode("utf-8")
        room = self.limits.max_output_bytes - len(self.console)
        if len(data) <= room:
            self.console += data
            return
        # truncate to the largest prefix of whole characters that fits: the
        # cut may split only the final character, so check whether its full
        # encoded width made it in
        fit = data[:room]
        lead = room - 1
        while lead >= 0 and (fit[lead] & 0xC0) == 0x80:
            lead -= 1
        if lead >= 0:
            first = fit[lead]
            width = 4 if first >= 0xF0 else 3 if first >= 0xE0 \
                else 2 if first >= 0xC0 else 1
            if lead + width > room:
                fit = fit[:lead]
        self.console += fit
        raise _FaultSignal(Fault(
            FaultKind.OUTPUT_LIMIT_EXCEEDED,
            f"console budget of {self.limits.max_output_bytes} bytes exceeded", span))

    def console_text(self) -> str:
        return self.console.decode("utf-8")


class _Interpreter:
    def __init__(self, policy: ExecutionPolicy, world: VirtualFs, clock) -> None:
        self.policy = policy
        self.profile = policy.profile
        self.fs = world
        self.meter = _Meter(policy, clock)

    # -- faults ---------------------------------------------------------

    def runtime_error(self, message: str, span: Span | None) -> _FaultSignal:
        return _FaultSignal(Fault(FaultKind.RUNTIME_ERROR, message, span))

    def require_capability(self, cap: Capability, span: Span | None) -> None:
        if not check_capability(self.profile, cap):
            raise _FaultSignal(Fault(
                FaultKind.CAPABILITY_DENIED,
                f"profile {self.profile.name!r} lacks the {cap.value} capability", span))

    # -- statements -------------------------------------------------------

    def exec_block_statements(self, statements: tuple[ast.Node, ...], env: _Env) -> None:
        for stmt in statements:  # hoisted function bindings
            if isinstance(stmt, ast.FnDef):
                env.bind(stmt.name, _Function(stmt, env), stmt.name_span)
        for stmt in statements:
            self.exec_stmt(stmt, env)

    def exec_stmt(self, stmt: ast.Node, env: _Env) -> None:
        self.meter.step(stmt.span)
        if isinstance(stmt, ast.LetStmt):
            env.bind(stmt.name, self.eval(stmt.value, env), stmt.name_span)
        elif isinstance(stmt, ast.AssignStmt):
            env.assign(stmt.name, self.eval(stmt.value, env), stmt.name_span)
        elif isinstance(stmt, ast.IfStmt):
            if self.truth(self.eval(stmt.cond, env), stmt.cond.span):
                self.exec_block(stmt.then_block, env)
            elif isinstance(stmt.else_branch, ast.Block):
                self.exec_block(stmt.else_branch, env)
            elif isinstance(stmt.else_branch, ast.IfStmt):
                self.exec_stmt(stmt.else_branch, env)
        elif isinstance(stmt, ast.WhileStmt):
            while self.truth(self.eval(stmt.cond, env), stmt.cond.span):
                self.exec_block(stmt.body, env)
        elif isinstance(stmt, ast.FnDef):
            pass  # bound when the block was entered
        elif isinstance(stmt, ast.ReturnStmt):
            value = self.eval(stmt.value, env) if stmt.value is not None else UNIT
            raise _ReturnSignal(value)
        elif isinstance(stmt, ast.ExprStmt):
            self.eval(stmt.expr, env)
        else:
            raise self.runtime_error(f"unexecutable node {stmt.kind}", stmt.span)

    def exec_block(self, block: ast.Block, env: _Env) -> None:
        self.meter.step(block.span)
        inner = _Env(env, self.meter)
        try:
            self.exec_block_statements(block.statements, inner)
        finally:
            inner.release()

    def truth(self, value, span: Span) -> bool:
        if isinstance(value, bool):
            return value
        raise self.runtime_error(f"condition must be bool, got {type_name(value)}", span)

    # -- expressions -----------------------------------------------------

    def eval(self, node: ast.Node, env: _Env) -> Value:
        self.meter.step(node.span)
        if isinstance(node, ast.IntLit):
            return node.value
        if isinstance(node, ast.BoolLit):
            return node.value
        if isinstance(node, ast.StringLit):
            return node.cooked
        if isinstance(node, ast.Ident):
            value = env.get(node.name, node.span)
            if isinstance(value, _Function):
                raise self.runtime_error(f"{node.name!r} is a function, not a value", node.span)
            return value
        if isinstance(node, ast.Unary):
            return self.unary(node, env)
        if isinstance(node, ast.Binary):
            return self.binary(node, env)
        if isinstance(node, ast.IfExpr):
            if self.truth(self.eval(node.cond, env), node.cond.span):
                return self.eval(node.then_expr, env)
            return self.eval(node.else_expr, env)
        if isinstance(node, ast.Call):
            return self.call(node, env)
        raise self.runtime_error(f"unevaluable node {node.kind}", node.span)

    def unary(self, node: ast.Unary, env: _Env) -> Value:
        value = self.eval(node.operand, env)
        if node.op == "-":
            if isinstance(value, bool) or not isinstance(value, int):
                raise self.runtime_error(f"unary '-' needs int, got {type_name(value)}",
                                         node.span)
            return self.check_int(-value, node.span)
        if isinstance(value, bool):
            return not value
        raise self.runtime_error(f"unary '!' needs bool, got {type_name(value)}", node.span)

    def check_int(self, value: int, span: Span) -> int:
        if value > INT64_MAX or value < INT64_MIN:
            raise self.runtime_error("integer overflow", span)
        return value

    def binary(self, node: ast.Binary, env: _Env) -> Value:
        op = node.op
        if op in ("&&", "||"):
            left = self.eval(node.left, env)
            if not isinstance(left, bool):
                raise self.runtime_error(f"'{op}' needs bool operands, got {type_name(left)}",
                                         node.left.span)
            if op == "&&" and not left:
                return False
            if op == "||" and left:
                return True
            right = self.eval(node.right, env)
            if not isinstance(right, bool):
                raise self.runtime_error(f"'{op}' needs bool operands, got {type_name(right)}",
                                         node.right.span)
            return right

        left = self.eval(node.left, env)
        right = self.eval(node.right, env)
        left_int = isinstance(left, int) and not isinstance(left, bool)
        right_int = isinstance(right, int) and not isinstance(right, bool)

        if op == "+":
            if left_int and right_int:
                return self.check_int(left + right, node.span)
            if isinstance(left, str) and isinstance(right, str):
                return left + right
            raise self.runtime_error(
                f"'+' needs two ints or two strings, got {type_name(left)} and "
                f"{type_name(right)}", node.span)
        if op in ("-", "*", "/", "%"):
            if not (left_int and right_int):
                raise self.runtime_error(
                    f"'{op}' needs int operands, got {type_name(left)} and {type_name(right)}",
                    node.span)
            if op == "-":
                return self.check_int(left - right, node.span)
            if op == "*":
                return self.check_int(left * right, node.span)
            if right == 0:
                raise self.runtime_error("division by zero", node.span)
            quotient = abs(left) // abs(right)
            if (left < 0) != (right < 0):
                quotient = -quotient  # truncate toward zero
            if op == "/":
                return self.check_int(quotient, node.span)
            return self.check_int(left - quotient * right, node.span)
        if op in ("==", "!="):
            if type_name(left) != type_name(right):
                raise self.runtime_error(
                    f"cannot compare {type_name(left)} with {type_name(right)}", node.span)
            equal = left is right if isinstance(left, Unit) else left == right
            return equal if op == "==" else not equal
        if op in ("<", "<=", ">", ">="):
            if not (left_int and right_int):
                raise self.runtime_error(
                    f"'{op}' needs int operands, got {type_name(left)} and {type_name(right)}",
                    node.span)
            if op == "<":
                return left < right
            if op == "<=":
                return left <= right
            if op == ">":
                return left > right
            return left >= right
        raise self.runtime_error(f"unknown operator {op!r}", node.span)

    # -- calls -------------------------------------------------------------

    def call(self, node: ast.Call, env: _Env) -> Value:
        target = None
        probe: _Env | None = env
        while probe is not None:
            if node.callee in probe.vals:
                target = probe.vals[node.callee]
                break
            probe = probe.parent
        if target is not None:
            if not isinstance(target, _Function):
                raise self.runtime_error(f"{node.callee!r} is not a function", node.callee_span)
            return self.call_function(target, node, env)
        if node.callee in BUILTINS:
            args = [self.eval(arg, env) for arg in node.args]
            return self.call_builtin(node, args)
        raise self.runtime_error(f"{node.callee!r} used before initialization",
                                 node.callee_span)

    def call_function(self, fn: _Function, node: ast.Call, env: _Env) -> Value:
        if len(node.args) != len(fn.defn.params):
            raise self.runtime_error(
                f"{node.callee!r} takes {len(fn.defn.params)} argument(s), "
                f"got {len(node.args)}", node.callee_span)
        args = [self.eval(arg, env) for arg in node.args]
        frame = _Env(fn.env, self.meter)
        try:
            for param, value in zip(fn.defn.params, args):
                frame.bind(param.name, value, param.span)
            try:
                self.exec_block_statements(fn.defn.body.statements, frame)
            except _ReturnSignal as ret:
                return ret.value
            return UNIT
        finally:
            frame.release()

    def call_builtin(self, node: ast.Call, args: list[Value]) -> Value:
        name = node.callee
        span = node.span
        sig = BUILTINS[name]
        if sig.capability is not None:
            self.require_capability(sig.capability, span)

        def want_str(i: int) -> str:
            if not isinstance(args[i], str):
                raise self.runtime_error(
                    f"{name}() argument {i + 1} must be string, got {type_name(args[i])}", span)
            return args[i]  # type: ignore[return-value]

        if name == "print":
            self.meter.write_console(render_value(args[0]) + "\n", span)
            return UNIT
        if name == "nl":
            return "\n"
        if name == "concat":
            return want_str(0) + want_str(1)
        if name == "len":
            return len(want_str(0))
        if name == "hash_sha1":
            return hashlib.sha1(want_str(0).encode("utf-8")).hexdigest().upper()
        if name == "hash_sha512":
            return hashlib.sha512(want_str(0).encode("utf-8")).hexdigest().upper()
        if name == "read_file":
            return self.read_file(want_str(0), span)
        if name == "write_file":
            return self.write_file(want_str(0), want_str(1), span)
        raise self.runtime_error(f"unknown builtin {name!r}", span)

    def read_file(self, path: str, span: Span) -> str:
        decision = check_fs_access(self.fs, self.profile, path, AccessMode.READ)
        if not decision:
            raise _FaultSignal(Fault(_DENIAL_TO_FAULT[decision.reason], decision.message, span))
        obj = self.fs.get(path)
        if obj is None:
            raise self.runtime_error(f"no such file: {path}", span)
        try:
            return obj.content.decode("utf-8")
        except UnicodeDecodeError:
            raise self.runtime_error(f"file is not valid UTF-8: {path}", span) from None

    def write_file(self, path: str, content: str, span: Span) -> Unit:
        decision = check_fs_access(self.fs, self.profile, path, AccessMode.WRITE)
        if not decision:
            raise _FaultSignal(Fault(_DENIAL_TO_FAULT[decision.reason], decision.message, span))
        existing = self.fs.get(path)
        if existing is not None:
            existing.content = content.encode("utf-8")
        else:
            # new objects take the writer's integrity and inherit the governing ACL
            found = self.fs.nearest_ancestor(path)
            acl = dict(found[1].acl) if found else {}
            self.fs.put(path, FsObject(content.encode("utf-8"),
                                       self.profile.integrity, acl))
        return UNIT


def run(
    text: SourceText | str,
    policy: ExecutionPolicy,
    world: VirtualFs | None = None,
    clock=time.monotonic,
) -> RunReport:
    """Compile then execute; nothing runs when compilation reports an error."""
    src = as_source(text)
    started = clock()
    diagnostics, tree = compile_text(src)
    if tree is None:
        wall = int((clock() - started) * 1000)
        return RunReport(diagnostics, "", None, None, 0, wall)

    interp = _Interpreter(policy, world if world is not None else VirtualFs(), clock)
    return_value: Value | None = None
    fault: Fault | None = None
    root = _Env(None, interp.meter)
    try:
        interp.exec_block_statements(tree.statements, root)
    except _ReturnSignal as ret:
        return_value = ret.value
    except _FaultSignal as sig:
        fault = sig.fault
    wall = int((clock() - started) * 1000)
    return RunReport(diagnostics, interp.meter.console_text(), return_value, fault,
                     interp.meter.steps, wall)
