"""The `bench` command line.

Subcommands mirror the HTTP endpoints one to one; with --json the output is
the exact response body the endpoint would produce. Exit codes: 0 on success,
1 when the result carries error diagnostics or the operation failed, 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..sandbox import PolicyError
from .config import ConfigError, load_config
from .handlers import (
    GatewayError,
    Workbench,
    diagnostics_have_errors,
    encode_envelope,
    envelope_error,
    envelope_ok,
    op_analyze,
    op_augment,
    op_commit,
    op_compile,
    op_fix,
    op_history,
    op_restore,
    op_run,
    op_version,
)
from .service import serve


def _read_script(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _policy_doc(path: str | None) -> dict | None:
    if path is None:
        return None
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _emit(args, envelope: dict, render) -> int:
    if args.json:
        sys.stdout.buffer.write(encode_envelope(envelope))
    elif envelope["ok"]:
        render(envelope["result"])
    else:
        err = envelope["error"]
        print(f"error [{err['kind']}]: {err['message']}", file=sys.stderr)
    if not envelope["ok"]:
        return 1
    return 1 if diagnostics_have_errors(envelope["result"]) else 0


def _render_diagnostics(diags: list[dict]) -> None:
    for d in diags:
        span = d["span"]
        print(f"{span['line']}:{span['column']} {d['code']} {d['severity']}: {d['message']}")


def _render_report(result: dict) -> None:
    _render_diagnostics(result["compile_diagnostics"])
    if result["console"]:
        print(result["console"], end="")
    if result["return_value"] is not None:
        rv = result["return_value"]
        print(f"=> {rv['type']}: {rv['value']}")
    if result["fault"] is not None:
        print(f"fault {result['fault']['kind']}: {result['fault']['message']}")
    print(f"({result['steps_used']} steps, {result['wall_ms']} ms)")


def _render_spans(result: dict) -> None:
    for span in result["spans"]:
        s = span["span"]
        effects = ", ".join(f"{k}={v}" for k, v in span["effects"].items())
        print(f"[{s['start']},{s['end']}) {span['stage']} {span['rule_id']}: {effects}")
    for problem in result["problems"]:
        print(f"problem {problem['kind']} in {problem['rule_id']}: {problem['message']}",
              file=sys.stderr)


def _render_history(result: dict) -> None:
    for entry in result["entries"]:
        print(f"{entry['hash'][:8]}  {entry['timestamp']}  {entry['author']}  "
              f"{entry['message']}")


def _workbench(args) -> Workbench:
    config = load_config(args.config)
    if getattr(args, "store", None):
        config.store = args.store
    if getattr(args, "policy", None):
        config.default_policy = args.policy
    return Workbench(config)


def _run_command(args) -> int:
    try:
        if args.command == "compile":
            envelope = envelope_ok(op_compile({"text": _read_script(args.script)}))
            return _emit(args, envelope, lambda r: _render_diagnostics(r["diagnostics"]))

        if args.command == "run":
            wb = _workbench(args)
            body = {"text": _read_script(args.script)}
            if args.policy:
                body["policy"] = _policy_doc(args.policy)
            envelope = envelope_ok(op_run(wb, body))
            return _emit(args, envelope, _render_report)

        if args.command == "analyze":
            envelope = envelope_ok(op_analyze({"text": _read_script(args.script)}))
            return _emit(args, envelope, lambda r: _render_diagnostics(r["diagnostics"]))

        if args.command == "fix":
            body = {"text": _read_script(args.script),
                    "diagnostic_index": args.diagnostic_index,
                    "fix_index": args.fix_index}
            envelope = envelope_ok(op_fix(body))

            def render(result: dict) -> None:
                print(result["new_text"], end="")
            return _emit(args, envelope, render)

        if args.command == "augment":
            wb = _workbench(args)
            body = {"text": _read_script(args.script), "ruleset": args.ruleset}
            if args.params:
                body["params"] = json.loads(args.params)
            envelope = envelope_ok(op_augment(wb, body))
            return _emit(args, envelope, _render_spans)

        if args.command == "commit":
            wb = _workbench(args)
            body = {"text": _read_script(args.script), "author": args.author,
                    "email": args.email, "message": args.message}
            if args.timestamp:
                body["timestamp"] = args.timestamp
            envelope = envelope_ok(op_commit(wb, args.script_id, body))
            return _emit(args, envelope,
                         lambda r: print(r["commit"]["hash"]))

        if args.command == "history":
            wb = _workbench(args)
            envelope = envelope_ok(op_history(wb, args.script_id))
            return _emit(args, envelope, _render_history)

        if args.command == "show":
            wb = _workbench(args)
            envelope = envelope_ok(op_version(wb, args.script_id, args.hash))
            return _emit(args, envelope, lambda r: print(r["content"], end=""))

        if args.command == "restore":
            wb = _workbench(args)
            body = {"hash": args.hash, "author": args.author, "email": args.email}
            if args.timestamp:
                body["timestamp"] = args.timestamp
            envelope = envelope_ok(op_restore(wb, args.script_id, body))
            return _emit(args, envelope, lambda r: print(r["commit"]["hash"]))

        if args.command == "serve":
            config = load_config(args.config)
            if args.store:
                config.store = args.store
            if args.policy:
                config.default_policy = args.policy
            if args.listen:
                config.listen = args.listen
            serve(config)
            return 0
    except GatewayError as exc:
        return _emit(args, envelope_error(exc.kind, exc.message), lambda r: None)
    except (ConfigError, PolicyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError(f"unhandled command {args.command}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="BenchScript workbench: compile, analyze, augment, run, and "
                    "version extension scripts.")
    parser.add_argument("--config", help="workbench config file (or $BENCH_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    def script_cmd(name: str, help_text: str):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("script", help="script file, or - for stdin")
        cmd.add_argument("--json", action="store_true",
                         help="emit the gateway response body verbatim")
        return cmd

    script_cmd("compile", "report compile diagnostics")

    run_cmd = script_cmd("run", "compile and execute under a sandbox policy")
    run_cmd.add_argument("--policy", help="policy JSON file")
    run_cmd.add_argument("--store", help=argparse.SUPPRESS)

    script_cmd("analyze", "run the static analyzers")

    fix_cmd = script_cmd("fix", "apply an offered code fix and print the result")
    fix_cmd.add_argument("diagnostic_index", type=int)
    fix_cmd.add_argument("fix_index", type=int, nargs="?", default=0)

    aug_cmd = script_cmd("augment", "compute augmentation spans")
    aug_cmd.add_argument("--ruleset", required=True,
                         help="builtin name or configured ruleset")
    aug_cmd.add_argument("--params", help="ruleset parameters as a JSON object")
    aug_cmd.add_argument("--store", help=argparse.SUPPRESS)
    aug_cmd.add_argument("--policy", help=argparse.SUPPRESS)

    commit_cmd = script_cmd("commit", "store the script as a new version")
    commit_cmd.add_argument("script_id")
    commit_cmd.add_argument("--store", help="store directory")
    commit_cmd.add_argument("--author", required=True)
    commit_cmd.add_argument("--email", required=True)
    commit_cmd.add_argument("--message", required=True)
    commit_cmd.add_argument("--timestamp", help=argparse.SUPPRESS)
    commit_cmd.add_argument("--policy", help=argparse.SUPPRESS)

    hist_cmd = sub.add_parser("history", help="list a script's versions, newest first")
    hist_cmd.add_argument("script_id")
    hist_cmd.add_argument("--store", help="store directory")
    hist_cmd.add_argument("--json", action="store_true")
    hist_cmd.add_argument("--policy", help=argparse.SUPPRESS)

    show_cmd = sub.add_parser("show", help="print the stored content of a version")
    show_cmd.add_argument("script_id")
    show_cmd.add_argument("hash")
    show_cmd.add_argument("--store", help="store directory")
    show_cmd.add_argument("--json", action="store_true")
    show_cmd.add_argument("--policy", help=argparse.SUPPRESS)

    restore_cmd = sub.add_parser("restore", help="append a new head from an old version")
    restore_cmd.add_argument("script_id")
    restore_cmd.add_argument("hash")
    restore_cmd.add_argument("--store", help="store directory")
    restore_cmd.add_argument("--author", required=True)
    restore_cmd.add_argument("--email", required=True)
    restore_cmd.add_argument("--timestamp", help=argparse.SUPPRESS)
    restore_cmd.add_argument("--json", action="store_true")
    restore_cmd.add_argument("--policy", help=argparse.SUPPRESS)

    serve_cmd = sub.add_parser("serve", help="start the HTTP gateway")
    serve_cmd.add_argument("--listen", help="host:port (default 127.0.0.1:7878)")
    serve_cmd.add_argument("--store", help="store directory")
    serve_cmd.add_argument("--policy", help="default policy JSON file")
    serve_cmd.set_defaults(json=False)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return _run_command(args)


if __name__ == "__main__":
    sys.exit(main())
