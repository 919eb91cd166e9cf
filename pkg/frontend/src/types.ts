/** Wire types mirroring the gateway's JSON schemas. */

export interface WireSpan {
  start: number; // byte offset
  end: number;   // byte offset, exclusive
  line: number;
  column: number;
}

export type Severity = "error" | "warning" | "info";

export interface Diagnostic {
  code: string;
  severity: Severity;
  message: string;
  span: WireSpan;
  fixable: boolean;
}

export interface Decoration {
  shape: "underline_bracket" | "underline_squiggle" | "box";
  color: string;
}

export interface Gutter {
  side: "left" | "right";
  glyph: string;
}

export interface Effects {
  foreground?: string;
  background?: string;
  font_style?: "normal" | "italic";
  font_weight?: "normal" | "bold";
  decoration?: Decoration;
  tooltip?: string;
  overlay_text?: string;
  gutter?: Gutter;
}

export interface AdviceAction {
  label: string;
  sample_code?: string;
  suppression_hint?: string;
}

export interface AdviceModel {
  id: string;
  title: string;
  message: string;
  secure_action: AdviceAction | null;
  insecure_action: AdviceAction | null;
  links: string[];
}

export type Stage = "inline" | "transform" | "background";

export interface AugmentationSpan {
  rule_id: string;
  span: WireSpan;
  line_fragments: WireSpan[];
  effects: Effects;
  advice: AdviceModel | null;
  stage: Stage;
}

export interface ReturnValue {
  type: "int" | "bool" | "string" | "unit";
  value: number | boolean | string | null;
}

export interface Fault {
  kind: string;
  message: string;
}

export interface RunReport {
  compile_diagnostics: Diagnostic[];
  console: string;
  return_value: ReturnValue | null;
  fault: Fault | null;
  steps_used: number;
  wall_ms: number;
}

export interface Commit {
  hash: string;
  parent: string | null;
  blob: string;
  script_id: string;
  author: string;
  email: string;
  timestamp: string;
  message: string;
}

export interface HistoryEntry {
  hash: string;
  timestamp: string;
  author: string;
  message: string;
}

export interface Envelope<T> {
  ok: boolean;
  result: T | null;
  error: { kind: string; message: string } | null;
}

export interface AugmentResult {
  spans: AugmentationSpan[];
  problems: { rule_id: string; kind: string; message: string }[];
}

export interface FixResult {
  new_text: string;
  applied: { diagnostic_code: string; title: string };
  diagnostics: Diagnostic[];
}

export function renderValue(rv: ReturnValue): string {
  switch (rv.type) {
    case "int":
      return String(rv.value);
    case "bool":
      return rv.value ? "true" : "false";
    case "string":
      return String(rv.value);
    case "unit":
      return "";
  }
}
