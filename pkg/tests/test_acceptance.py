"""Acceptance suite: one test per release criterion, one printed verdict each.

Run with `pytest tests/test_acceptance.py -v -s` to see the verdict lines.
"""

from __future__ import annotations

import json
import random
import subprocess
import sys
import threading
import time
import urllib.request

from benchscript.analyze import analyze, apply_fix, fixes_for
from benchscript.augment import builtin_ruleset, compute_spans
from benchscript.diagnostics import Severity, SourceText
from benchscript.gateway.config import WorkbenchConfig
from benchscript.gateway.service import WorkbenchServer
from benchscript.lang import FaultKind, compile_text, run
from benchscript.sandbox import (
    AccessMode,
    Capability,
    FsObject,
    IntegrityLevel,
    VirtualFs,
)
from benchscript.vcs import (
    Blob,
    Store,
    commit_script,
    fsck,
    get_version,
    history,
    restore,
)

from conftest import make_policy
from oracle_augment import engine_span_tuples, oracle_spans


def verdict(name: str) -> None:
    print(f"[acceptance] {name}: PASS")


def test_smalltalk_ruleset_fidelity(postcard):
    rules = builtin_ruleset("smalltalk")
    started = time.monotonic()
    engine = engine_span_tuples(compute_spans(SourceText(postcard), rules))
    elapsed = time.monotonic() - started
    expected = oracle_spans(postcard, rules)
    mismatches = sum(1 for pair in zip(engine, expected) if pair[0] != pair[1]) \
        + abs(len(engine) - len(expected))
    assert mismatches == 0
    assert len(engine) > 20  # the postcard genuinely exercises the ruleset
    assert elapsed < 1.0
    verdict(f"smalltalk-postcard-fidelity ({len(engine)} spans, {elapsed * 1000:.0f} ms)")


def test_clear_text_overlay():
    mapping = {"F1001": "Category ID", "T2000": "Categories", "F2001": "Name"}
    text = SourceText("F1001.T2000.F2001")
    original = text.content
    spans = compute_spans(text, builtin_ruleset("identifier_overlay", mapping))
    overlays = [s for s in spans if s.effects.overlay_text is not None]
    assert [s.effects.overlay_text for s in overlays] \
        == ["Category ID", "Categories", "Name"]
    assert len(overlays) == 3
    assert text.content == original
    verdict("clear-text-overlay")


def _generate_program(rng: random.Random, with_sha1: bool) -> str:
    pieces = ["alpha", "beta", "data", "x1", ""]
    lines = []
    names = []
    for i in range(rng.randrange(1, 4)):
        raw = "\\n".join(rng.choice(pieces) for _ in range(rng.randrange(2, 4)))
        lines.append(f'let s{i} = "{raw}";')
        names.append(f"s{i}")
    for name in names:
        lines.append(f"print({name});")
    if with_sha1:
        lines.append(f'let d = hash_sha1({names[0]});')
        lines.append("print(d);")
    lines.append(f"return len({' + '.join(names)});")
    return "\n".join(lines)


def test_analyzer_fix_loop():
    rng = random.Random(20240311)
    policy = make_policy()
    checked = 0
    for index in range(20):
        with_sha1 = index % 2 == 1
        source = _generate_program(rng, with_sha1)
        src = SourceText(source)
        diags, tree = compile_text(src)
        assert tree is not None, diags
        assert any(d.code in ("A001", "A002") for d in analyze(tree, src))

        current = src
        for _ in range(200):
            _, tree = compile_text(current)
            targets = [d for d in analyze(tree, current) if d.code in ("A001", "A002")]
            if not targets:
                break
            fixes = fixes_for(targets[0], current)
            assert fixes
            current = apply_fix(current, fixes[0]).new_text
        _, tree = compile_text(current)
        remaining = [d for d in analyze(tree, current) if d.code in ("A001", "A002")]
        assert remaining == []

        if not with_sha1:  # A001-only: behavior must be byte-identical
            before = run(src, policy)
            after = run(current, policy)
            assert before.fault is None and after.fault is None
            assert before.console.encode() == after.console.encode()
            assert before.return_value == after.return_value
        checked += 1
    assert checked == 20
    verdict("analyzer-fix-loop (20 programs)")


def test_debug_capture(factorial_source):
    policy = make_policy()
    report = run(factorial_source, policy)
    assert report.return_value == 120
    assert isinstance(report.return_value, int)
    assert report.console != ""
    assert report.fault is None

    typo = factorial_source.replace("return n * factorial(n - 1);",
                                    "retrn n * factorial(n - 1);")
    broken = run(typo, policy)
    assert sum(1 for d in broken.compile_diagnostics
               if d.severity is Severity.ERROR) >= 1
    assert broken.console == ""
    assert broken.return_value is None
    assert broken.steps_used == 0
    verdict("debug-capture (factorial + retrn typo)")


def test_sandbox_suite():
    # (a) missing capability
    no_write = make_policy(capabilities=frozenset({Capability.FILE_READ,
                                                   Capability.CONSOLE_WRITE}))
    report = run('write_file("/data/f.txt", "x");', no_write, VirtualFs())
    assert report.fault.kind is FaultKind.CAPABILITY_DENIED

    # (b) capability present, no ACL entry
    reader = make_policy()
    fs = VirtualFs()
    fs.put("/data/f.txt", FsObject(b"secret", IntegrityLevel.MEDIUM, {}))
    report = run('return read_file("/data/f.txt");', reader, fs)
    assert report.fault.kind is FaultKind.ACL_DENIED

    # (c) low-integrity writer, medium object, full ACL
    low = make_policy(integrity=IntegrityLevel.LOW)
    fs = VirtualFs()
    fs.put("/doc.txt", FsObject(b"x", IntegrityLevel.MEDIUM,
                                {low.profile.id: AccessMode.READ_WRITE}))
    report = run('write_file("/doc.txt", "y");', low, fs)
    assert report.fault.kind is FaultKind.INTEGRITY_DENIED

    # (d) fuel is the hard stop, promptly
    fuelled = make_policy(max_steps=100_000)
    started = time.monotonic()
    report = run("while (true) { }", fuelled)
    elapsed = time.monotonic() - started
    assert report.fault.kind is FaultKind.FUEL_EXHAUSTED
    assert report.steps_used == 100_000
    assert elapsed < 1.0

    # (e) output flood against a 4096-byte cap
    capped = make_policy(max_output_bytes=4096)
    report = run('while (true) { print("0123456789abcdef"); }', capped)
    assert report.fault.kind is FaultKind.OUTPUT_LIMIT_EXCEEDED
    assert len(report.console.encode("utf-8")) <= 4096
    verdict(f"sandbox-suite (fuel stop in {elapsed * 1000:.0f} ms)")

_PROFILE_ID_SNIPPET = """
import hashlib, random
from benchscript.sandbox import profile_id
rng = random.Random(13)
names = [f"tenant-{rng.randrange(10**12)}-{i}" for i in range(10000)]
ids = [profile_id(n) for n in names]
print(len(set(ids)))
print(hashlib.sha256("".join(ids).encode()).hexdigest())
"""


def test_profile_determinism_across_processes():
    outputs = []
    for _ in range(2):
        proc = subprocess.run([sys.executable, "-c", _PROFILE_ID_SNIPPET],
                              capture_output=True, check=True)
        outputs.append(proc.stdout.decode().split())
    assert outputs[0] == outputs[1]
    assert outputs[0][0] == "10000"  # pairwise distinct
    verdict("profile-determinism (10000 names, two processes)")


def test_vcs_suite():
    # fixed fixture, hashes computed with a standalone SHA-256 tool beforehand
    store = Store()
    fixed = commit_script(store, "00000000-0000-0000-0000-000000000001", b"hello",
                          "A", "a@x", "m", "2023-01-01T00:00:00Z")
    assert Blob.of(b"hello").hash \
        == "e8900d81b48abadd8aec128db924d53063c292353e7863f7b1da56b30aefd93d"
    assert fixed.hash \
        == "a2e825bacf195adeabd50a7b504638da316538236855a5b07c5de4e1a89b8526"

    rng = random.Random(42)
    store = Store()
    scripts = [f"00000000-0000-0000-0000-0000000000{i:02x}" for i in range(4)]
    committed: dict[str, bytes] = {}
    tick = [0]

    def stamp() -> str:
        tick[0] += 1
        t = tick[0]
        return f"2024-01-01T{t // 3600:02d}:{(t // 60) % 60:02d}:{t % 60:02d}Z"

    object_count = 0
    for _ in range(1000):
        sid = rng.choice(scripts)
        entries = history(store, sid)
        if entries and rng.random() < 0.35:
            target = rng.choice(entries).hash
            commit = restore(store, sid, target, "bot", "bot@x", stamp())
        else:
            content = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 64)))
            commit = commit_script(store, sid, content, "bot", "bot@x",
                                   f"change {tick[0]}", stamp())
            committed[commit.hash] = content
        assert len(store.objects) >= object_count  # append-only
        object_count = len(store.objects)

    for commit_hash, content in committed.items():
        assert get_version(store, commit_hash) == content  # round-trip
    assert fsck(store) == []
    verdict("vcs-suite (1000 operations + fixed hashes)")


def test_cli_http_parity(tmp_path, factorial_source, postcard):
    config = WorkbenchConfig(listen="127.0.0.1:0")
    server = WorkbenchServer(config)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    port = server.server_address[1]
    try:
        newline_prog = 'let s = "a\\nb";'
        sha_prog = 'let d = hash_sha1("x");'
        requests = [
            (["compile"], "/compile", {"text": factorial_source}, factorial_source),
            (["compile"], "/compile", {"text": "retrn 1;"}, "retrn 1;"),
            (["compile"], "/compile", {"text": 'print("Hello World");'},
             'print("Hello World");'),
            (["analyze"], "/analyze", {"text": newline_prog}, newline_prog),
            (["analyze"], "/analyze", {"text": sha_prog}, sha_prog),
            (["analyze"], "/analyze", {"text": factorial_source}, factorial_source),
            (["fix", "0"], "/fix",
             {"text": newline_prog, "diagnostic_index": 0, "fix_index": 0},
             newline_prog),
            (["fix", "0"], "/fix",
             {"text": sha_prog, "diagnostic_index": 0, "fix_index": 0}, sha_prog),
            (["augment", "--ruleset", "smalltalk"], "/augment",
             {"text": postcard, "ruleset": "smalltalk"}, postcard),
            (["augment", "--ruleset", "sha1_warning"], "/augment",
             {"text": sha_prog, "ruleset": "sha1_warning"}, sha_prog),
        ]
        assert len(requests) == 10
        for i, (cli_head, path, body, text) in enumerate(requests):
            script = tmp_path / f"req{i}.bs"
            script.write_text(text, encoding="utf-8")
            argv = [cli_head[0], str(script), *cli_head[1:], "--json"]
            proc = subprocess.run([sys.executable, "-m", "benchscript.gateway.cli",
                                   *argv], capture_output=True)
            req = urllib.request.Request(f"http://127.0.0.1:{port}{path}",
                                         data=json.dumps(body).encode(), method="POST")
            with urllib.request.urlopen(req) as resp:
                http_body = resp.read()
            assert proc.stdout == http_body, f"request {i} ({path}) diverged"
        verdict("cli-http-parity (10 requests byte-identical)")
    finally:
        server.shutdown()
