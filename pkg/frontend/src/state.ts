/** View state store: a single mutable snapshot plus change notifications.
 *
 * All queue/selection logic lives here as pure methods so it can be tested
 * without a DOM; app.ts only renders the snapshot and forwards events.
 */

import type { PairSummary, Progress, QueueFilter, QueuePage, ViewMode } from "./types";

export interface ViewState {
  filter: QueueFilter;
  mode: ViewMode;
  queue: QueuePage | null;
  currentId: string | null;
  overlayThreshold: number;
  overlayOpacity: number;
  progress: Progress | null;
  banner: string | null;      // connection failure message, null when healthy
  labelInFlight: boolean;
}

export const OVERLAY_THRESHOLD_BOUNDS = { min: 0, max: 600 };
export const OVERLAY_OPACITY_BOUNDS = { min: 0, max: 1 };

export function clamp(value: number, min: number, max: number): number {
  return Math.min(Math.max(value, min), max);
}

/** The pair the reviewer should see after finishing `afterId`: the next
 * pending item below it, wrapping to the top; null when nothing is pending. */
export function nextPendingAfter(items: PairSummary[], afterId: string | null): string | null {
  const pending = items.filter((item) => item.pending);
  if (pending.length === 0) return null;
  if (afterId === null) return pending[0]!.pair_id;
  const index = items.findIndex((item) => item.pair_id === afterId);
  for (const item of items.slice(index + 1)) {
    if (item.pending && item.pair_id !== afterId) return item.pair_id;
  }
  for (const item of items.slice(0, index + 1)) {
    if (item.pending && item.pair_id !== afterId) return item.pair_id;
  }
  return null;
}

export function neighborId(
  items: PairSummary[], currentId: string | null, step: 1 | -1,
): string | null {
  if (items.length === 0) return null;
  if (currentId === null) return items[0]!.pair_id;
  const index = items.findIndex((item) => item.pair_id === currentId);
  if (index < 0) return items[0]!.pair_id;
  const next = index + step;
  if (next < 0 || next >= items.length) return currentId;
  return items[next]!.pair_id;
}

export type Listener = (state: ViewState) => void;

export class Store {
  state: ViewState = {
    filter: "pending",
    mode: "side_by_side",
    queue: null,
    currentId: null,
    overlayThreshold: 200,
    overlayOpacity: 0.5,
    progress: null,
    banner: null,
    labelInFlight: false,
  };

  private listeners: Listener[] = [];

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<ViewState>): void {
    Object.assign(this.state, patch);
    for (const listener of this.listeners) listener(this.state);
  }

  items(): PairSummary[] {
    return this.state.queue?.items ?? [];
  }

  current(): PairSummary | null {
    return this.items().find((i) => i.pair_id === this.state.currentId) ?? null;
  }

  setOverlayThreshold(value: number): void {
    this.update({
      overlayThreshold: clamp(value, OVERLAY_THRESHOLD_BOUNDS.min, OVERLAY_THRESHOLD_BOUNDS.max),
    });
  }

  setOverlayOpacity(value: number): void {
    this.update({
      overlayOpacity: clamp(value, OVERLAY_OPACITY_BOUNDS.min, OVERLAY_OPACITY_BOUNDS.max),
    });
  }

  /** Optimistically mark a row with a committed label; returns the previous
   * summary fields so a failed request can roll back exactly. */
  applyLabelLocally(pairId: string, label: PairSummary["label"]): Partial<PairSummary> | null {
    const item = this.items().find((i) => i.pair_id === pairId);
    if (!item) return null;
    const before = { label: item.label, source: item.source, pending: item.pending };
    item.label = label;
    item.source = "HUMAN";
    item.pending = false;
    this.update({});
    return before;
  }

  rollbackLabel(pairId: string, before: Partial<PairSummary>): void {
    const item = this.items().find((i) => i.pair_id === pairId);
    if (item) {
      Object.assign(item, before);
      this.update({});
    }
  }
}
