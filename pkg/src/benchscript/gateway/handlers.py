"""Operation handlers shared by the HTTP service and the CLI.

Both frontends funnel through these functions and through one JSON encoder,
which is what makes `bench <op> --json` output byte-identical to the matching
endpoint's response body.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

from ..analyze import analyze, apply_fix, fixes_for
from ..augment import (
    BUILTIN_ADVICE,
    AugmentError,
    RuleProblem,
    Ruleset,
    UnknownRulesetError,
    builtin_ruleset,
    compute_spans,
    load_ruleset_file,
)
from ..diagnostics import Severity, SourceText
from ..lang import compile_text, run
from ..sandbox import ExecutionPolicy, PolicyError, VirtualFs, default_policy, \
    load_policy_file, policy_from_json
from ..vcs import (
    EmptyAuthorError,
    EmptyMessageError,
    ForeignCommitError,
    InvalidScriptIdError,
    InvalidTimestampError,
    Store,
    UnknownCommitError,
    commit_script,
    get_version,
    history,
    restore,
    validate_script_id,
)
from .config import WorkbenchConfig


class GatewayError(Exception):
    def __init__(self, status: int, kind: str, message: str):
        super().__init__(message)
        self.status = status
        self.kind = kind
        self.message = message


def envelope_ok(result: dict) -> dict:
    return {"ok": True, "result": result, "error": None}


def envelope_error(kind: str, message: str) -> dict:
    return {"ok": False, "result": None, "error": {"kind": kind, "message": message}}


def encode_envelope(envelope: dict) -> bytes:
    return json.dumps(envelope, separators=(",", ":")).encode("utf-8") + b"\n"


def now_rfc3339() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _required_str(body: dict, key: str) -> str:
    value = body.get(key)
    if not isinstance(value, str):
        raise GatewayError(400, "BadRequest", f"field {key!r} must be a string")
    return value


@dataclass
class Workbench:
    """Shared state: default policy, named rulesets, script store, one lock."""

    config: WorkbenchConfig = field(default_factory=WorkbenchConfig)

    def __post_init__(self) -> None:
        if self.config.default_policy:
            self.policy, self.world = load_policy_file(self.config.default_policy)
        else:
            self.policy, self.world = default_policy(), VirtualFs()
        self.rulesets: dict[str, Ruleset] = {}
        for path in self.config.rulesets:
            self.rulesets[Path(path).stem] = load_ruleset_file(path)
        self.store = Store.open(self.config.store) if self.config.store else Store()
        self.store_lock = threading.Lock()

    def resolve_ruleset(self, name: str, params: dict | None) -> Ruleset:
        if name in self.rulesets:
            return self.rulesets[name]
        try:
            rules = builtin_ruleset(name, params)
        except UnknownRulesetError as exc:
            raise GatewayError(404, "UnknownRuleset", str(exc)) from None
        except AugmentError as exc:
            raise GatewayError(400, "BadRequest", str(exc)) from None
        return Ruleset(rules=rules, advice=dict(BUILTIN_ADVICE))

    def run_policy(self, body: dict) -> tuple[ExecutionPolicy, VirtualFs]:
        doc = body.get("policy")
        if doc is None:
            return self.policy, self.world.clone()
        try:
            return policy_from_json(doc)
        except PolicyError as exc:
            raise GatewayError(400, "InvalidPolicy", str(exc)) from None


# -- stateless operations ---------------------------------------------------


def op_compile(body: dict) -> dict:
    text = _required_str(body, "text")
    diagnostics, _ = compile_text(SourceText(text))
    return {"diagnostics": [d.to_json() for d in diagnostics]}


def op_run(workbench: Workbench, body: dict) -> dict:
    text = _required_str(body, "text")
    policy, world = workbench.run_policy(body)
    report = run(SourceText(text), policy, world)
    return report.to_json()


def op_augment(workbench: Workbench, body: dict) -> dict:
    text = _required_str(body, "text")
    name = _required_str(body, "ruleset")
    params = body.get("params")
    if params is not None and not isinstance(params, dict):
        raise GatewayError(400, "BadRequest", "field 'params' must be an object")
    ruleset = workbench.resolve_ruleset(name, params)
    catalog = dict(BUILTIN_ADVICE)
    catalog.update(ruleset.advice)
    problems: list[RuleProblem] = []
    spans = compute_spans(SourceText(text), ruleset.rules, catalog, problems)
    return {"spans": [s.to_json() for s in spans],
            "problems": [p.to_json() for p in problems]}


def _analysis(text: str) -> list:
    """Compile diagnostics when broken, compile + analyzer diagnostics when clean."""
    src = SourceText(text)
    diagnostics, tree = compile_text(src)
    if tree is None:
        return diagnostics
    return sorted(diagnostics + analyze(tree, src),
                  key=lambda d: (d.span.start, d.code))


def op_analyze(body: dict) -> dict:
    text = _required_str(body, "text")
    return {"diagnostics": [d.to_json() for d in _analysis(text)]}


def op_fix(body: dict) -> dict:
    text = _required_str(body, "text")
    diag_index = body.get("diagnostic_index")
    fix_index = body.get("fix_index", 0)
    if not isinstance(diag_index, int) or not isinstance(fix_index, int):
        raise GatewayError(400, "BadRequest",
                           "diagnostic_index and fix_index must be integers")
    diagnostics = _analysis(text)
    if not 0 <= diag_index < len(diagnostics):
        raise GatewayError(400, "BadIndex",
                           f"diagnostic_index {diag_index} out of range "
                           f"(have {len(diagnostics)})")
    src = SourceText(text)
    fixes = fixes_for(diagnostics[diag_index], src)
    if not 0 <= fix_index < len(fixes):
        raise GatewayError(400, "BadIndex",
                           f"diagnostic has {len(fixes)} fix(es), asked for {fix_index}")
    result = apply_fix(src, fixes[fix_index])
    new_text = result.new_text.content
    return {"new_text": new_text,
            "applied": fixes[fix_index].to_json(),
            "diagnostics": [d.to_json() for d in _analysis(new_text)]}


# -- script store operations ------------------------------------------------


def _checked_id(script_id: str) -> str:
    try:
        return validate_script_id(script_id)
    except InvalidScriptIdError as exc:
        raise GatewayError(400, "InvalidScriptId", str(exc)) from None


def op_commit(workbench: Workbench, script_id: str, body: dict,
              timestamp: str | None = None) -> dict:
    script_id = _checked_id(script_id)
    text = _required_str(body, "text")
    author = _required_str(body, "author")
    email = _required_str(body, "email")
    message = _required_str(body, "message")
    stamp = body.get("timestamp") or timestamp or now_rfc3339()
    try:
        with workbench.store_lock:
            commit = commit_script(workbench.store, script_id, text.encode("utf-8"),
                                   author, email, message, stamp)
    except (EmptyAuthorError, EmptyMessageError, InvalidTimestampError) as exc:
        raise GatewayError(400, "BadRequest", str(exc)) from None
    return {"commit": commit.to_json()}


def op_history(workbench: Workbench, script_id: str) -> dict:
    script_id = _checked_id(script_id)
    with workbench.store_lock:
        entries = history(workbench.store, script_id)
    return {"entries": [e.to_json() for e in entries]}


def op_version(workbench: Workbench, script_id: str, commit_hash: str) -> dict:
    script_id = _checked_id(script_id)
    with workbench.store_lock:
        known = {e.hash for e in history(workbench.store, script_id)}
        if commit_hash not in known:
            raise GatewayError(404, "UnknownCommit",
                               f"{commit_hash} is not a version of {script_id}")
        content = get_version(workbench.store, commit_hash)
    try:
        return {"content": content.decode("utf-8")}
    except UnicodeDecodeError:
        raise GatewayError(400, "NotText",
                           "stored version is not UTF-8 text") from None


def op_restore(workbench: Workbench, script_id: str, body: dict,
               timestamp: str | None = None) -> dict:
    script_id = _checked_id(script_id)
    commit_hash = _required_str(body, "hash")
    author = _required_str(body, "author")
    email = _required_str(body, "email")
    stamp = body.get("timestamp") or timestamp or now_rfc3339()
    try:
        with workbench.store_lock:
            commit = restore(workbench.store, script_id, commit_hash, author, email, stamp)
    except ForeignCommitError as exc:
        raise GatewayError(404, "ForeignCommit", str(exc)) from None
    except UnknownCommitError as exc:
        raise GatewayError(404, "UnknownCommit", str(exc)) from None
    except (EmptyAuthorError, InvalidTimestampError) as exc:
        raise GatewayError(400, "BadRequest", str(exc)) from None
    return {"commit": commit.to_json()}


def diagnostics_have_errors(result: dict) -> bool:
    """True when an operation result carries at least one error diagnostic."""
    diags = result.get("diagnostics") or result.get("compile_diagnostics") or []
    return any(d.get("severity") == Severity.ERROR.value for d in diags)
