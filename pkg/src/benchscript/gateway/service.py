"""JSON-over-HTTP service exposing the workbench operations.

Routes:
    POST /compile /run /augment /analyze /fix
    POST /scripts/{id}/commit /scripts/{id}/restore
    GET  /scripts/{id}/history /scripts/{id}/versions/{hash}

Every response body is an envelope {"ok", "result", "error"}; the HTTP status
mirrors the error kind (400 bad request, 404 unknown resource, 413 oversized
body). Compile/run/augment/analyze/fix are stateless per request; store
mutations serialize through the workbench lock.
"""

from __future__ import annotations

import json
import re
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .config import WorkbenchConfig
from .handlers import (
    GatewayError,
    Workbench,
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

_SCRIPTS_RE = re.compile(r"^/scripts/([^/]+)/(commit|restore|history|versions)(?:/([^/]+))?$")


class WorkbenchServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, config: WorkbenchConfig, workbench: Workbench | None = None):
        self.workbench = workbench or Workbench(config)
        self.config = config
        super().__init__(config.host_port, _Handler)


class _Handler(BaseHTTPRequestHandler):
    server: WorkbenchServer

    def log_message(self, format: str, *args) -> None:  # quiet by default
        pass

    def _send(self, status: int, envelope: dict) -> None:
        body = encode_envelope(envelope)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self) -> None:  # browser preflight for the UI
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length > self.server.config.max_body_bytes:
            raise GatewayError(413, "BodyTooLarge",
                               f"request body exceeds {self.server.config.max_body_bytes} bytes")
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise GatewayError(400, "MalformedJson", str(exc)) from None
        if not isinstance(body, dict):
            raise GatewayError(400, "MalformedJson", "request body must be a JSON object")
        return body

    def do_POST(self) -> None:
        wb = self.server.workbench
        try:
            body = self._read_body()
            if self.path == "/compile":
                result = op_compile(body)
            elif self.path == "/run":
                result = op_run(wb, body)
            elif self.path == "/augment":
                result = op_augment(wb, body)
            elif self.path == "/analyze":
                result = op_analyze(body)
            elif self.path == "/fix":
                result = op_fix(body)
            else:
                match = _SCRIPTS_RE.match(self.path)
                if match and match.group(2) == "commit" and not match.group(3):
                    result = op_commit(wb, match.group(1), body)
                elif match and match.group(2) == "restore" and not match.group(3):
                    result = op_restore(wb, match.group(1), body)
                else:
                    raise GatewayError(404, "UnknownEndpoint", f"no endpoint {self.path}")
            self._send(200, envelope_ok(result))
        except GatewayError as exc:
            self._send(exc.status, envelope_error(exc.kind, exc.message))

    def do_GET(self) -> None:
        wb = self.server.workbench
        try:
            if self.path == "/":
                self._send(200, envelope_ok({"service": "benchscript", "endpoints": [
                    "/compile", "/run", "/augment", "/analyze", "/fix",
                    "/scripts/{id}/commit", "/scripts/{id}/history",
                    "/scripts/{id}/versions/{hash}", "/scripts/{id}/restore"]}))
                return
            match = _SCRIPTS_RE.match(self.path)
            if match and match.group(2) == "history" and not match.group(3):
                result = op_history(wb, match.group(1))
            elif match and match.group(2) == "versions" and match.group(3):
                result = op_version(wb, match.group(1), match.group(3))
            else:
                raise GatewayError(404, "UnknownEndpoint", f"no endpoint {self.path}")
            self._send(200, envelope_ok(result))
        except GatewayError as exc:
            self._send(exc.status, envelope_error(exc.kind, exc.message))


def serve(config: WorkbenchConfig) -> None:
    server = WorkbenchServer(config)
    host, port = server.server_address[:2]
    print(f"bench workbench listening on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
