/** Editor decoration model.
 *
 * Turns the document plus the gateway's span list into display segments.
 * The document is never modified: overlays only swap what a segment shows,
 * and a selection in display space maps back to stored source characters.
 */

import { OffsetTable } from "./offsets.js";
import type { AugmentationSpan, Decoration } from "./types.js";

export interface SegmentStyle {
  foreground?: string;
  background?: string;
  fontStyle?: string;
  fontWeight?: string;
}

export interface Segment {
  /** Text the segment displays (overlay text when `overlay` is set). */
  text: string;
  srcStart: number;
  srcEnd: number;
  style: SegmentStyle;
  decorations: Decoration[];
  tooltip?: string;
  /** Index into the span list whose advice a click should open. */
  adviceIndex?: number;
  overlay: boolean;
}

export interface LineView {
  segments: Segment[];
  leftGutter: string[];
  rightGutter: string[];
}

interface CharSpan {
  cs: number;
  ce: number;
  index: number;
  span: AugmentationSpan;
}

function toCharSpans(table: OffsetTable, spans: AugmentationSpan[],
                     warn: (msg: string) => void): CharSpan[] {
  const out: CharSpan[] = [];
  spans.forEach((span, index) => {
    try {
      out.push({
        cs: table.indexOfByte(span.span.start),
        ce: table.indexOfByte(span.span.end),
        index,
        span,
      });
    } catch (err) {
      warn(`ignoring span of rule ${span.rule_id}: ${String(err)}`);
    }
  });
  return out;
}

/** Build per-line display segments from the document and its spans. */
export function buildLineViews(
  document: string,
  spans: AugmentationSpan[],
  overlaysEnabled = true,
  warn: (msg: string) => void = (msg) => console.warn(msg),
): LineView[] {
  const table = new OffsetTable(document);
  const charSpans = toCharSpans(table, spans, warn);
  const overlays = overlaysEnabled
    ? charSpans.filter((c) => c.span.effects.overlay_text !== undefined && c.cs < c.ce)
    : [];

  const cuts = new Set<number>([0, document.length]);
  for (const c of charSpans) {
    cuts.add(c.cs);
    cuts.add(c.ce);
  }
  for (let i = 0; i < document.length; i++) {
    if (document[i] === "\n") cuts.add(i + 1);
  }
  // overlay ranges render atomically: drop interior cut points
  for (const ov of overlays) {
    for (const cut of [...cuts]) {
      if (cut > ov.cs && cut < ov.ce) cuts.delete(cut);
    }
    cuts.add(ov.cs);
    cuts.add(ov.ce);
  }
  const points = [...cuts].sort((a, b) => a - b);

  const lines: LineView[] = [{ segments: [], leftGutter: [], rightGutter: [] }];
  for (let p = 0; p + 1 < points.length; p++) {
    const cs = points[p]!;
    const ce = points[p + 1]!;
    if (cs >= ce) continue;
    const covering = charSpans.filter((c) => c.cs <= cs && ce <= c.ce && c.cs < c.ce);
    const overlay = overlays.find((o) => o.cs === cs && o.ce === ce);

    const style: SegmentStyle = {};
    const decorations: Decoration[] = [];
    let tooltip: string | undefined;
    let adviceIndex: number | undefined;
    // listed order is (start, -priority, rule id); apply in reverse so the
    // earlier-listed span wins each style channel
    for (let i = covering.length - 1; i >= 0; i--) {
      const { effects } = covering[i]!.span;
      if (effects.foreground !== undefined) style.foreground = effects.foreground;
      if (effects.background !== undefined) style.background = effects.background;
      if (effects.font_style !== undefined) style.fontStyle = effects.font_style;
      if (effects.font_weight !== undefined) style.fontWeight = effects.font_weight;
    }
    for (const c of covering) {
      if (c.span.effects.decoration) decorations.push(c.span.effects.decoration);
      if (tooltip === undefined && c.span.effects.tooltip !== undefined) {
        tooltip = c.span.effects.tooltip;
      }
      if (adviceIndex === undefined && c.span.advice !== null) {
        adviceIndex = c.index;
      }
      const unknown = Object.keys(c.span.effects).filter(
        (k) => !["foreground", "background", "font_style", "font_weight",
                 "decoration", "tooltip", "overlay_text", "gutter"].includes(k));
      for (const channel of unknown) {
        warn(`unknown effect channel ${channel} ignored`);
      }
    }

    const source = document.slice(cs, ce);
    const segment: Segment = {
      text: overlay ? overlay.span.effects.overlay_text! : source,
      srcStart: cs,
      srcEnd: ce,
      style,
      decorations,
      overlay: overlay !== undefined,
    };
    if (tooltip !== undefined) segment.tooltip = tooltip;
    if (adviceIndex !== undefined) segment.adviceIndex = adviceIndex;

    appendSegment(lines, segment);
  }

  // gutter glyphs attach per line touched by the span
  for (const c of charSpans) {
    const gutter = c.span.effects.gutter;
    if (!gutter) continue;
    const firstLine = lineOfChar(document, c.cs);
    const lastLine = lineOfChar(document, Math.max(c.cs, c.ce - 1));
    for (let line = firstLine; line <= lastLine && line < lines.length; line++) {
      (gutter.side === "left" ? lines[line]!.leftGutter
                              : lines[line]!.rightGutter).push(gutter.glyph);
    }
  }
  return lines;
}

function appendSegment(lines: LineView[], segment: Segment): void {
  // split display text at newlines so each LineView holds one rendered line
  const parts = segment.text.split("\n");
  let srcCursor = segment.srcStart;
  parts.forEach((part, i) => {
    const isLast = i === parts.length - 1;
    const srcLen = segment.overlay ? (isLast ? segment.srcEnd - srcCursor : 0)
                                   : part.length + (isLast ? 0 : 1);
    lines[lines.length - 1]!.segments.push({
      ...segment,
      text: part,
      srcStart: srcCursor,
      srcEnd: Math.min(srcCursor + srcLen, segment.srcEnd),
    });
    srcCursor += srcLen;
    if (!isLast) {
      lines.push({ segments: [], leftGutter: [], rightGutter: [] });
    }
  });
}

function lineOfChar(document: string, index: number): number {
  let line = 0;
  for (let i = 0; i < index && i < document.length; i++) {
    if (document[i] === "\n") line++;
  }
  return line;
}

/** Concatenated display text (what the decorated view shows). */
export function displayText(lines: LineView[]): string {
  return lines.map((l) => l.segments.map((s) => s.text).join("")).join("\n");
}

/** Map a selection in display space back to stored source characters.
 *
 * Copying through this mapping can never yield overlay text: any part of an
 * overlaid range contributes that range's source characters instead.
 */
export function sourceForDisplayRange(
  document: string,
  lines: LineView[],
  displayFrom: number,
  displayTo: number,
): string {
  let out = "";
  let cursor = 0;
  const flat: Segment[] = [];
  lines.forEach((line, i) => {
    flat.push(...line.segments);
    if (i + 1 < lines.length) {
      flat.push({ text: "\n", srcStart: -1, srcEnd: -1, style: {},
                  decorations: [], overlay: false });
    }
  });
  for (const segment of flat) {
    const ds = cursor;
    const de = cursor + segment.text.length;
    cursor = de;
    const from = Math.max(displayFrom, ds);
    const to = Math.min(displayTo, de);
    if (from >= to) continue;
    if (segment.srcStart < 0) {
      out += "\n";
    } else if (segment.overlay) {
      out += document.slice(segment.srcStart, segment.srcEnd);
    } else {
      out += document.slice(segment.srcStart + (from - ds),
                            segment.srcStart + (to - ds));
    }
  }
  return out;
}
