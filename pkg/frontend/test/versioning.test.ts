import assert from "node:assert/strict";
import { test } from "node:test";

import {
  initialVersioning,
  restoreEnabled,
  validateStore,
  withHistory,
  withSelection,
} from "../src/versioning.js";

const entry = (hash: string) => ({
  hash, timestamp: "2024-01-01T00:00:00Z", author: "a", message: "m",
});

test("restore is disabled until a row is selected", () => {
  let state = initialVersioning();
  assert.equal(restoreEnabled(state), false);
  state = withSelection(state, "abc", "old content");
  assert.equal(restoreEnabled(state), true);
});

test("preview always reflects the selected row", () => {
  const state = withSelection(initialVersioning(), "abc", "old content");
  assert.equal(state.preview, "old content");
  assert.equal(state.selected, "abc");
});

test("selection survives a history refresh that still contains it", () => {
  let state = withSelection(initialVersioning(), "abc", "old");
  state = withHistory(state, [entry("def"), entry("abc")]);
  assert.equal(state.selected, "abc");
  assert.equal(state.preview, "old");
});

test("selection clears when the row disappears", () => {
  let state = withSelection(initialVersioning(), "abc", "old");
  state = withHistory(state, [entry("def")]);
  assert.equal(state.selected, null);
  assert.equal(state.preview, "");
});

test("empty message blocks store with inline validation", () => {
  const state = validateStore({ ...initialVersioning(), message: "   " });
  assert.ok(state.validation);
  const ok = validateStore({ ...initialVersioning(), message: "real change" });
  assert.equal(ok.validation, null);
});
