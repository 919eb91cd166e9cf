/** Versioning window state: history rows, selection-driven preview, and the
 * guards around storing and restoring. */

import type { HistoryEntry } from "./types.js";

export interface VersioningState {
  entries: HistoryEntry[];
  selected: string | null;
  preview: string;
  message: string;
  validation: string | null;
}

export function initialVersioning(): VersioningState {
  return { entries: [], selected: null, preview: "", message: "", validation: null };
}

export function withHistory(state: VersioningState,
                            entries: HistoryEntry[]): VersioningState {
  const selected = entries.some((e) => e.hash === state.selected)
    ? state.selected
    : null;
  return { ...state, entries, selected, preview: selected ? state.preview : "" };
}

export function withSelection(state: VersioningState, hash: string,
                              preview: string): VersioningState {
  return { ...state, selected: hash, preview };
}

export function restoreEnabled(state: VersioningState): boolean {
  return state.selected !== null;
}

/** Empty commit messages block the store action with inline validation. */
export function validateStore(state: VersioningState): VersioningState {
  if (state.message.trim() === "") {
    return { ...state, validation: "enter a commit message" };
  }
  return { ...state, validation: null };
}
