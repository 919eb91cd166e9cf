/** DOM bootstrap: binds the controller to the page. */

import { WorkbenchController, type WorkbenchState } from "./controller.js";
import { sourceForDisplayRange } from "./editor.js";
import { GatewayClient } from "./gateway.js";
import { renderAdvice, renderDiagnostics, renderHistory, renderLines } from "./render.js";

const params = new URLSearchParams(window.location.search);
const gatewayUrl = params.get("gateway") ?? "http://127.0.0.1:7878";
const scriptId = params.get("script") ?? "3c1a8f2e-0000-4000-8000-0123456789ab";

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
};

const editor = el<HTMLTextAreaElement>("editor");
const view = el<HTMLDivElement>("decorated-view");
const leftPane = el<HTMLPreElement>("left-pane");
const rightPane = el<HTMLPreElement>("right-pane");
const faultBanner = el<HTMLDivElement>("fault-banner");
const retryBanner = el<HTMLDivElement>("retry-banner");
const diagnosticsBox = el<HTMLDivElement>("diagnostics");
const popover = el<HTMLDivElement>("advice-popover");
const historyBox = el<HTMLDivElement>("history");
const preview = el<HTMLPreElement>("preview");
const messageInput = el<HTMLInputElement>("commit-message");
const messageValidation = el<HTMLSpanElement>("message-validation");
const restoreButton = el<HTMLButtonElement>("restore-button");
const runButton = el<HTMLButtonElement>("run-button");

const gateway = new GatewayClient(gatewayUrl);
const controller = new WorkbenchController(gateway, scriptId, renderAll);

function renderAll(state: WorkbenchState): void {
  if (editor.value !== state.document) editor.value = state.document;
  view.innerHTML = renderLines(controller.lineViews());
  diagnosticsBox.innerHTML = renderDiagnostics(state.diagnostics);
  leftPane.textContent = state.panes.left;
  rightPane.textContent = state.panes.right;
  faultBanner.textContent = state.panes.fault ?? "";
  faultBanner.hidden = state.panes.fault === null;
  retryBanner.textContent = state.retryBanner ?? "";
  retryBanner.hidden = state.retryBanner === null;
  runButton.disabled = state.runPending;
  if (state.popover) {
    popover.innerHTML = renderAdvice(state.popover);
    popover.hidden = false;
  } else {
    popover.hidden = true;
  }
  historyBox.innerHTML = renderHistory(state.versioning.entries,
                                       state.versioning.selected);
  preview.textContent = state.versioning.preview;
  if (messageInput.value !== state.versioning.message) {
    messageInput.value = state.versioning.message;
  }
  messageValidation.textContent = state.versioning.validation ?? "";
  restoreButton.disabled = state.versioning.selected === null;
}

let refreshTimer: number | undefined;
editor.addEventListener("input", () => {
  controller.setDocument(editor.value);
  window.clearTimeout(refreshTimer);
  refreshTimer = window.setTimeout(() => void controller.refreshDecorations(), 300);
});

el<HTMLSelectElement>("ruleset-select").addEventListener("change", (event) => {
  controller.setRuleset((event.target as HTMLSelectElement).value);
  void controller.refreshDecorations();
});

el<HTMLInputElement>("overlays-toggle").addEventListener("change", (event) => {
  controller.setOverlaysEnabled((event.target as HTMLInputElement).checked);
});

el<HTMLButtonElement>("compile-button").addEventListener("click",
  () => void controller.compile());
runButton.addEventListener("click", () => void controller.compileAndExecute());

view.addEventListener("click", (event) => {
  const target = (event.target as HTMLElement).closest("[data-advice]");
  if (target) {
    controller.openAdvice(Number(target.getAttribute("data-advice")));
  }
});

// copying from the decorated view always yields stored source characters
view.addEventListener("copy", (event) => {
  const selection = window.getSelection();
  if (!selection || selection.rangeCount === 0) return;
  const text = selection.toString();
  const full = view.textContent ?? "";
  const start = full.indexOf(text);
  if (start < 0) return;
  event.clipboardData?.setData("text/plain", sourceForDisplayRange(
    controller.state.document, controller.lineViews(), start, start + text.length));
  event.preventDefault();
});

popover.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.classList.contains("dismiss")) controller.dismissPopover();
  if (target.classList.contains("copy-sample")) {
    const code = popover.querySelector(".sample-code")?.textContent ?? "";
    void navigator.clipboard.writeText(code);
  }
});

diagnosticsBox.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.classList.contains("fix-button")) {
    void controller.applyFix(Number(target.getAttribute("data-diagnostic")));
  }
});

historyBox.addEventListener("click", (event) => {
  const row = (event.target as HTMLElement).closest("tr[data-hash]");
  if (row) void controller.selectVersion(row.getAttribute("data-hash")!);
});

messageInput.addEventListener("input", () => {
  controller.setCommitMessage(messageInput.value);
});
el<HTMLButtonElement>("store-button").addEventListener("click",
  () => void controller.store());
restoreButton.addEventListener("click", () => void controller.restoreSelected());

controller.setDocument(
  `// BenchScript sample
fn factorial(n) {
    if (n == 0) { return 1; }
    return n * factorial(n - 1);
}
print("factorial of 5:");
print(factorial(5));
return factorial(5);
`);
void controller.refreshDecorations();
void controller.refreshHistory();
