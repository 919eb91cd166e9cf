import assert from "node:assert/strict";
import { test } from "node:test";

import { buildLineViews } from "../src/editor.js";
import { renderAdvice, renderDiagnostics, renderHistory, renderLines } from "../src/render.js";
import type { AdviceModel, Diagnostic } from "../src/types.js";
import { overlaySpan } from "./stub.js";

test("overlay segments render overlay text but carry source offsets", () => {
  const lines = buildLineViews("F1001", [overlaySpan(0, 5, "Category ID")]);
  const html = renderLines(lines);
  assert.ok(html.includes("Category ID"));
  assert.ok(!html.includes(">F1001<"));
  assert.ok(html.includes('data-src-start="0"'));
  assert.ok(html.includes('data-src-end="5"'));
});

test("html is escaped", () => {
  const lines = buildLineViews('let s = "<b>&</b>";', []);
  const html = renderLines(lines);
  assert.ok(html.includes("&lt;b&gt;&amp;&lt;/b&gt;"));
});

test("fixable diagnostics get a fix button with their index", () => {
  const diags: Diagnostic[] = [
    { code: "A001", severity: "warning", message: "m",
      span: { start: 0, end: 1, line: 1, column: 1 }, fixable: true },
    { code: "A003", severity: "info", message: "m2",
      span: { start: 2, end: 3, line: 1, column: 3 }, fixable: false },
  ];
  const html = renderDiagnostics(diags);
  assert.ok(html.includes('data-diagnostic="0"'));
  assert.ok(!html.includes('data-diagnostic="1"'));
});

test("advice popover shows sample code, suppression hint, and links", () => {
  const advice: AdviceModel = {
    id: "sha1-advice",
    title: "Insecure hash function",
    message: "prefer a modern digest",
    secure_action: { label: "Switch", sample_code: 'hash_sha512("input")' },
    insecure_action: { label: "Keep", suppression_hint: "legacy interop only" },
    links: ["https://example.org/hashes"],
  };
  const html = renderAdvice(advice);
  assert.ok(html.includes("hash_sha512(&quot;input&quot;)"));
  assert.ok(html.includes("legacy interop only"));
  assert.ok(html.includes('href="https://example.org/hashes"'));
  assert.ok(html.includes("copy-sample"));
});

test("history table marks the selected row", () => {
  const html = renderHistory([
    { hash: "aaa", timestamp: "t1", author: "x", message: "first" },
    { hash: "bbb", timestamp: "t2", author: "y", message: "second" },
  ], "bbb");
  assert.ok(html.includes('data-hash="aaa"'));
  assert.ok(html.includes('class="selected" data-hash="bbb"'));
});
