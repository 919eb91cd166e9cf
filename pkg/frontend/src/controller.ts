/** Workbench controller: every action the UI offers, DOM-free.
 *
 * Holds the single source of truth for view state and talks to the gateway.
 * All decorations and diagnostics come from the service; when it cannot be
 * reached they are cleared and a retry banner is raised, so nothing keeps
 * rendering from stale local computation.
 */

import { buildLineViews, type LineView } from "./editor.js";
import { NetworkUnavailableError, type Gateway } from "./gateway.js";
import { routeCompile, routeReport, type PaneState } from "./panes.js";
import type { AdviceModel, AugmentationSpan, Diagnostic } from "./types.js";
import {
  initialVersioning,
  restoreEnabled,
  validateStore,
  withHistory,
  withSelection,
  type VersioningState,
} from "./versioning.js";

export interface WorkbenchState {
  document: string;
  ruleset: string;
  overlaysEnabled: boolean;
  spans: AugmentationSpan[];
  diagnostics: Diagnostic[];
  panes: PaneState;
  popover: AdviceModel | null;
  runPending: boolean;
  retryBanner: string | null;
  author: string;
  email: string;
  scriptId: string;
  versioning: VersioningState;
}

export class WorkbenchController {
  state: WorkbenchState;

  constructor(
    private readonly gateway: Gateway,
    scriptId: string,
    private readonly onChange: (state: WorkbenchState) => void = () => {},
  ) {
    this.state = {
      document: "",
      ruleset: "sha1_warning",
      overlaysEnabled: true,
      spans: [],
      diagnostics: [],
      panes: { left: "", right: "", fault: null },
      popover: null,
      runPending: false,
      retryBanner: null,
      author: "workbench",
      email: "workbench@local",
      scriptId,
      versioning: initialVersioning(),
    };
  }

  private update(patch: Partial<WorkbenchState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  lineViews(): LineView[] {
    return buildLineViews(this.state.document, this.state.spans,
                          this.state.overlaysEnabled);
  }

  setDocument(text: string): void {
    this.update({ document: text });
  }

  setRuleset(name: string): void {
    this.update({ ruleset: name });
  }

  setOverlaysEnabled(enabled: boolean): void {
    this.update({ overlaysEnabled: enabled });
  }

  setCommitMessage(message: string): void {
    this.update({ versioning: { ...this.state.versioning, message } });
  }

  /** Pull spans and diagnostics from the service for the current text. */
  async refreshDecorations(params?: Record<string, string>): Promise<void> {
    try {
      const [augmented, analyzed] = await Promise.all([
        this.gateway.augment(this.state.document, this.state.ruleset, params),
        this.gateway.analyze(this.state.document),
      ]);
      this.update({
        spans: augmented.spans,
        diagnostics: analyzed.diagnostics,
        retryBanner: null,
      });
    } catch (err) {
      this.handleFailure(err);
    }
  }

  /** Re-fetch spans only; used when diagnostics are already fresh. */
  private async refreshSpans(params?: Record<string, string>): Promise<void> {
    const augmented = await this.gateway.augment(this.state.document,
                                                 this.state.ruleset, params);
    this.update({ spans: augmented.spans, retryBanner: null });
  }

  async compile(): Promise<void> {
    try {
      const { diagnostics } = await this.gateway.compile(this.state.document);
      this.update({ panes: routeCompile(diagnostics), retryBanner: null });
    } catch (err) {
      this.handleFailure(err);
    }
  }

  async compileAndExecute(): Promise<void> {
    if (this.state.runPending) return;
    this.update({ runPending: true });
    try {
      const report = await this.gateway.run(this.state.document);
      this.update({ panes: routeReport(report), retryBanner: null });
    } catch (err) {
      this.handleFailure(err);
    } finally {
      this.update({ runPending: false });
    }
  }

  /** Click on a decorated segment: open the attached advice, if any. */
  openAdvice(spanIndex: number): void {
    const span = this.state.spans[spanIndex];
    if (span && span.advice) {
      this.update({ popover: span.advice });
    }
  }

  dismissPopover(): void {
    this.update({ popover: null });
  }

  async applyFix(diagnosticIndex: number, fixIndex = 0): Promise<void> {
    try {
      const result = await this.gateway.fix(this.state.document, diagnosticIndex,
                                            fixIndex);
      // the fix response already carries post-fix diagnostics
      this.update({
        document: result.new_text,
        diagnostics: result.diagnostics,
        retryBanner: null,
      });
      await this.refreshSpans();
    } catch (err) {
      this.handleFailure(err);
    }
  }

  async refreshHistory(): Promise<void> {
    try {
      const { entries } = await this.gateway.history(this.state.scriptId);
      this.update({ versioning: withHistory(this.state.versioning, entries),
                    retryBanner: null });
    } catch (err) {
      this.handleFailure(err);
    }
  }

  /** Store the current editor text as a new version. */
  async store(): Promise<void> {
    const validated = validateStore(this.state.versioning);
    this.update({ versioning: validated });
    if (validated.validation !== null) return;
    try {
      await this.gateway.commit(this.state.scriptId, this.state.document,
                                this.state.author, this.state.email,
                                validated.message);
      this.update({ versioning: { ...this.state.versioning, message: "" } });
      await this.refreshHistory();
    } catch (err) {
      this.handleFailure(err);
    }
  }

  async selectVersion(hash: string): Promise<void> {
    try {
      const { content } = await this.gateway.version(this.state.scriptId, hash);
      this.update({ versioning: withSelection(this.state.versioning, hash, content),
                    retryBanner: null });
    } catch (err) {
      this.handleFailure(err);
    }
  }

  /** Restore the selected version: loads it into the editor and appends a
   * restore commit; the history refreshes afterwards. */
  async restoreSelected(): Promise<void> {
    if (!restoreEnabled(this.state.versioning)) return;
    const hash = this.state.versioning.selected!;
    try {
      await this.gateway.restore(this.state.scriptId, hash, this.state.author,
                                 this.state.email);
      this.update({ document: this.state.versioning.preview });
      await this.refreshHistory();
      await this.refreshDecorations();
    } catch (err) {
      this.handleFailure(err);
    }
  }

  private handleFailure(err: unknown): void {
    if (err instanceof NetworkUnavailableError) {
      // server-sourced data only: decorations vanish when the network does
      this.update({
        spans: [],
        diagnostics: [],
        retryBanner: "workbench service unreachable; retry when it is back",
      });
      return;
    }
    this.update({ retryBanner: err instanceof Error ? err.message : String(err) });
  }
}
