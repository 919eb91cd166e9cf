/** Typed client for the workbench gateway. All rendering data comes from
 * here: the UI computes no matches, diagnostics, or versions on its own. */

import type {
  AugmentResult,
  Commit,
  Diagnostic,
  Envelope,
  FixResult,
  HistoryEntry,
  RunReport,
} from "./types.js";

export class GatewayRequestError extends Error {
  constructor(readonly kind: string, message: string) {
    super(message);
  }
}

export class NetworkUnavailableError extends Error {}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** The operations the UI needs; tests substitute stubs for the HTTP client. */
export interface Gateway {
  compile(text: string): Promise<{ diagnostics: Diagnostic[] }>;
  run(text: string, policy?: unknown): Promise<RunReport>;
  augment(text: string, ruleset: string,
          params?: Record<string, string>): Promise<AugmentResult>;
  analyze(text: string): Promise<{ diagnostics: Diagnostic[] }>;
  fix(text: string, diagnosticIndex: number, fixIndex?: number): Promise<FixResult>;
  commit(scriptId: string, text: string, author: string, email: string,
         message: string): Promise<{ commit: Commit }>;
  history(scriptId: string): Promise<{ entries: HistoryEntry[] }>;
  version(scriptId: string, hash: string): Promise<{ content: string }>;
  restore(scriptId: string, hash: string, author: string,
          email: string): Promise<{ commit: Commit }>;
}

export class GatewayClient implements Gateway {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (u, i) => fetch(u, i),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.baseUrl + path, {
        method,
        headers: body === undefined ? undefined : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new NetworkUnavailableError(String(err));
    }
    const envelope = (await response.json()) as Envelope<T>;
    if (!envelope.ok || envelope.result === null) {
      const error = envelope.error ?? { kind: "Unknown", message: "no error detail" };
      throw new GatewayRequestError(error.kind, error.message);
    }
    return envelope.result;
  }

  compile(text: string): Promise<{ diagnostics: Diagnostic[] }> {
    return this.request("POST", "/compile", { text });
  }

  run(text: string, policy?: unknown): Promise<RunReport> {
    const body: Record<string, unknown> = { text };
    if (policy !== undefined) body.policy = policy;
    return this.request("POST", "/run", body);
  }

  augment(text: string, ruleset: string, params?: Record<string, string>): Promise<AugmentResult> {
    const body: Record<string, unknown> = { text, ruleset };
    if (params !== undefined) body.params = params;
    return this.request("POST", "/augment", body);
  }

  analyze(text: string): Promise<{ diagnostics: Diagnostic[] }> {
    return this.request("POST", "/analyze", { text });
  }

  fix(text: string, diagnosticIndex: number, fixIndex = 0): Promise<FixResult> {
    return this.request("POST", "/fix", {
      text,
      diagnostic_index: diagnosticIndex,
      fix_index: fixIndex,
    });
  }

  commit(scriptId: string, text: string, author: string, email: string,
         message: string): Promise<{ commit: Commit }> {
    return this.request("POST", `/scripts/${scriptId}/commit`,
                        { text, author, email, message });
  }

  history(scriptId: string): Promise<{ entries: HistoryEntry[] }> {
    return this.request("GET", `/scripts/${scriptId}/history`);
  }

  version(scriptId: string, hash: string): Promise<{ content: string }> {
    return this.request("GET", `/scripts/${scriptId}/versions/${hash}`);
  }

  restore(scriptId: string, hash: string, author: string,
          email: string): Promise<{ commit: Commit }> {
    return this.request("POST", `/scripts/${scriptId}/restore`, { hash, author, email });
  }
}
