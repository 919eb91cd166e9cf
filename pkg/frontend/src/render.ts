/** HTML renderers. Pure string producers so tests can assert on them. */

import type { LineView, Segment } from "./editor.js";
import { formatDiagnostic } from "./panes.js";
import type { AdviceModel, Diagnostic } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function styleAttr(segment: Segment): string {
  const rules: string[] = [];
  if (segment.style.foreground) rules.push(`color:${segment.style.foreground}`);
  if (segment.style.background) rules.push(`background-color:${segment.style.background}`);
  if (segment.style.fontStyle) rules.push(`font-style:${segment.style.fontStyle}`);
  if (segment.style.fontWeight) rules.push(`font-weight:${segment.style.fontWeight}`);
  for (const deco of segment.decorations) {
    if (deco.shape === "underline_squiggle") {
      rules.push(`text-decoration:underline wavy ${deco.color}`);
    } else if (deco.shape === "underline_bracket") {
      rules.push(`border-bottom:2px solid ${deco.color}`);
    } else {
      rules.push(`outline:1px solid ${deco.color}`);
    }
  }
  return rules.length ? ` style="${rules.join(";")}"` : "";
}

export function renderLines(lines: LineView[]): string {
  const html = lines.map((line) => {
    const left = line.leftGutter.length
      ? `<span class="gutter gutter-left">${escapeHtml(line.leftGutter.join(""))}</span>` : "";
    const right = line.rightGutter.length
      ? `<span class="gutter gutter-right">${escapeHtml(line.rightGutter.join(""))}</span>` : "";
    const body = line.segments.map((segment) => {
      const classes = ["seg"];
      if (segment.overlay) classes.push("overlay");
      if (segment.adviceIndex !== undefined) classes.push("has-advice");
      const tooltip = segment.tooltip !== undefined
        ? ` title="${escapeHtml(segment.tooltip)}"` : "";
      const advice = segment.adviceIndex !== undefined
        ? ` data-advice="${segment.adviceIndex}"` : "";
      const src = ` data-src-start="${segment.srcStart}" data-src-end="${segment.srcEnd}"`;
      return `<span class="${classes.join(" ")}"${styleAttr(segment)}${tooltip}${advice}${src}>`
        + `${escapeHtml(segment.text)}</span>`;
    }).join("");
    return `<div class="line">${left}<span class="line-body">${body}</span>${right}</div>`;
  }).join("");
  return html || '<div class="line"><span class="line-body"></span></div>';
}

export function renderDiagnostics(diagnostics: Diagnostic[]): string {
  if (diagnostics.length === 0) {
    return '<p class="empty">no findings</p>';
  }
  return "<ul>" + diagnostics.map((d, i) => {
    const fix = d.fixable
      ? ` <button class="fix-button" data-diagnostic="${i}">fix</button>` : "";
    return `<li class="diag ${d.severity}">${escapeHtml(formatDiagnostic(d))}${fix}</li>`;
  }).join("") + "</ul>";
}

export function renderAdvice(advice: AdviceModel): string {
  const secure = advice.secure_action
    ? `<div class="advice-secure"><strong>${escapeHtml(advice.secure_action.label)}</strong>`
      + `<pre class="sample-code">${escapeHtml(advice.secure_action.sample_code ?? "")}</pre>`
      + `<button class="copy-sample">copy sample</button></div>`
    : "";
  const insecure = advice.insecure_action
    ? `<div class="advice-insecure"><strong>${escapeHtml(advice.insecure_action.label)}</strong>`
      + `<p>${escapeHtml(advice.insecure_action.suppression_hint ?? "")}</p></div>`
    : "";
  const links = advice.links.length
    ? `<p class="advice-links">${advice.links.map((url) =>
        `<a href="${escapeHtml(url)}" target="_blank" rel="noreferrer">${escapeHtml(url)}</a>`,
      ).join(" ")}</p>`
    : "";
  return `<h3>${escapeHtml(advice.title)}</h3>`
    + `<p>${escapeHtml(advice.message)}</p>${secure}${insecure}${links}`
    + `<button class="dismiss">dismiss</button>`;
}

export function renderHistory(entries: { hash: string; timestamp: string;
                                         author: string; message: string }[],
                              selected: string | null): string {
  if (entries.length === 0) {
    return '<p class="empty">no versions yet</p>';
  }
  return "<table><thead><tr><th>when</th><th>author</th><th>message</th></tr></thead><tbody>"
    + entries.map((e) => {
      const cls = e.hash === selected ? ' class="selected"' : "";
      return `<tr${cls} data-hash="${e.hash}"><td>${escapeHtml(e.timestamp)}</td>`
        + `<td>${escapeHtml(e.author)}</td><td>${escapeHtml(e.message)}</td></tr>`;
    }).join("") + "</tbody></table>";
}
