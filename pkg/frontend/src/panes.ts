/** Output pane routing for the run panel.
 *
 * The left pane carries compiler errors or the return value, the right pane
 * carries console output, and faults surface in their own banner. The two
 * streams never cross.
 */

import type { Diagnostic, RunReport } from "./types.js";
import { renderValue } from "./types.js";

export interface PaneState {
  left: string;
  right: string;
  fault: string | null;
}

export function formatDiagnostic(d: Diagnostic): string {
  return `${d.span.line}:${d.span.column} ${d.code} ${d.severity}: ${d.message}`;
}

export function routeCompile(diagnostics: Diagnostic[]): PaneState {
  const left = diagnostics.length === 0
    ? "compilation succeeded"
    : diagnostics.map(formatDiagnostic).join("\n");
  return { left, right: "", fault: null };
}

export function routeReport(report: RunReport): PaneState {
  let left: string;
  if (report.compile_diagnostics.some((d) => d.severity === "error")) {
    left = report.compile_diagnostics.map(formatDiagnostic).join("\n");
  } else if (report.return_value !== null) {
    left = renderValue(report.return_value);
  } else {
    left = "";
  }
  return {
    left,
    right: report.console,
    fault: report.fault ? `${report.fault.kind}: ${report.fault.message}` : null,
  };
}
