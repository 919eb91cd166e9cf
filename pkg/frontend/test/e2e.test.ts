/** End-to-end workflow against the real workbench service:
 * edit -> advice popover -> fix -> run -> commit -> restore.
 */

import assert from "node:assert/strict";
import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { after, before, test } from "node:test";

import { WorkbenchController } from "../src/controller.js";
import { GatewayClient } from "../src/gateway.js";

const SCRIPT_ID = "7f3d9b2c-1111-4222-8333-abcdefabcdef";

let service: ChildProcess;
let gateway: GatewayClient;

function startService(): Promise<string> {
  const store = mkdtempSync(join(tmpdir(), "bench-e2e-"));
  service = spawn("python3", ["-u", "-m", "benchscript.gateway.cli", "serve",
                              "--listen", "127.0.0.1:0", "--store", store],
                  { stdio: ["ignore", "pipe", "inherit"] });
  return new Promise((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("service did not start")), 15000);
    let buffered = "";
    service.stdout!.on("data", (chunk: Buffer) => {
      buffered += chunk.toString();
      const match = buffered.match(/listening on (http:\/\/[\d.]+:\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(match[1]!);
      }
    });
    service.on("exit", (code) => reject(new Error(`service exited early: ${code}`)));
  });
}

before(async () => {
  const baseUrl = await startService();
  gateway = new GatewayClient(baseUrl);
});

after(() => {
  service.kill();
});

test("e2e: edit, advice popover, fix, run, commit, restore", async () => {
  const controller = new WorkbenchController(gateway, SCRIPT_ID);

  // edit: a script with an insecure hash call and a newline escape
  controller.setDocument([
    'let greeting = "hello\\nworkbench";',
    'let digest = hash_sha1(greeting);',
    'print(greeting);',
    'return len(digest);',
  ].join("\n"));
  await controller.refreshDecorations();

  // decorations are service-sourced: the sha1 call is flagged with advice
  const flagged = controller.state.spans.findIndex((s) => s.advice !== null);
  assert.ok(flagged >= 0, "expected an advice-carrying span");
  assert.deepEqual(
    controller.state.diagnostics.filter((d) => d.code === "A001").length, 1);
  assert.deepEqual(
    controller.state.diagnostics.filter((d) => d.code === "A002").length, 1);

  // advice popover opens on click and offers copyable sample code
  controller.openAdvice(flagged);
  assert.ok(controller.state.popover);
  assert.ok(controller.state.popover!.secure_action?.sample_code);
  assert.ok(controller.state.popover!.links.length > 0);
  controller.dismissPopover();

  // fix everything the analyzers flagged as fixable
  for (let guard = 0; guard < 10; guard++) {
    const index = controller.state.diagnostics.findIndex(
      (d) => d.fixable && (d.code === "A001" || d.code === "A002"));
    if (index < 0) break;
    await controller.applyFix(index);
  }
  assert.ok(controller.state.document.includes("hash_sha512"));
  assert.ok(controller.state.document.includes("+ nl() +"));
  assert.equal(controller.state.diagnostics.filter(
    (d) => d.code === "A001" || d.code === "A002").length, 0);

  // run: console right, return value left
  await controller.compileAndExecute();
  assert.equal(controller.state.panes.right, "hello\nworkbench\n");
  assert.equal(controller.state.panes.left, "128");  // sha512 hex digest length
  assert.equal(controller.state.panes.fault, null);

  // commit the fixed script
  const fixedDocument = controller.state.document;
  controller.setCommitMessage("fixed and verified");
  await controller.store();
  assert.equal(controller.state.versioning.entries.length, 1);
  const v1 = controller.state.versioning.entries[0]!.hash;

  // edit again and commit a second version
  controller.setDocument('print("drafting v2");');
  controller.setCommitMessage("rewrite");
  await controller.store();
  assert.equal(controller.state.versioning.entries.length, 2);

  // select the old version: the preview shows its exact content
  await controller.selectVersion(v1);
  assert.equal(controller.state.versioning.preview, fixedDocument);

  // restore: editor content returns to v1, history gains an append-only row
  await controller.restoreSelected();
  assert.equal(controller.state.document, fixedDocument);
  assert.equal(controller.state.versioning.entries.length, 3);
  assert.ok(controller.state.versioning.entries[0]!.message.startsWith("Restore "));

  // the restored script still runs identically
  await controller.compileAndExecute();
  assert.equal(controller.state.panes.left, "128");
});

test("e2e: compile errors route to the left pane and block execution", async () => {
  const controller = new WorkbenchController(gateway, SCRIPT_ID);
  controller.setDocument("retrn 1;");
  await controller.compileAndExecute();
  assert.ok(controller.state.panes.left.includes("P002"));
  assert.equal(controller.state.panes.right, "");
});

test("e2e: runaway scripts surface as a fault banner", async () => {
  const controller = new WorkbenchController(gateway, SCRIPT_ID);
  controller.setDocument("while (true) { }");
  await controller.compileAndExecute();
  // fuel is the hard stop; the advisory wall clock may fire first on slow hosts
  assert.match(controller.state.panes.fault ?? "",
               /FuelExhausted|WallClockExceeded/);
});
