import { describe, expect, it } from "vitest";

import { clamp, neighborId, nextPendingAfter, Store } from "../src/state";
import type { PairSummary } from "../src/types";

function item(id: string, pending = true): PairSummary {
  return {
    pair_id: id,
    timestamp: "2023-02-05T17:48:30.000+00:00",
    max_temp_c: 100,
    label: pending ? null : "FIRE",
    source: pending ? null : "HUMAN",
    pending,
  };
}

describe("nextPendingAfter", () => {
  it("walks forward to the next pending item", () => {
    const items = [item("a", false), item("b"), item("c"), item("d", false)];
    expect(nextPendingAfter(items, "b")).toBe("c");
  });

  it("wraps to the top when the tail is done", () => {
    const items = [item("a"), item("b", false), item("c", false)];
    expect(nextPendingAfter(items, "c")).toBe("a");
  });

  it("returns null when nothing is pending", () => {
    expect(nextPendingAfter([item("a", false)], "a")).toBeNull();
    expect(nextPendingAfter([], null)).toBeNull();
  });

  it("starts from the first pending item when unfocused", () => {
    const items = [item("a", false), item("b")];
    expect(nextPendingAfter(items, null)).toBe("b");
  });

  it("never returns the item it advanced from", () => {
    expect(nextPendingAfter([item("only")], "only")).toBeNull();
  });
});

describe("neighborId", () => {
  const items = [item("a"), item("b"), item("c")];

  it("steps both directions and clamps at the ends", () => {
    expect(neighborId(items, "b", 1)).toBe("c");
    expect(neighborId(items, "b", -1)).toBe("a");
    expect(neighborId(items, "c", 1)).toBe("c");
    expect(neighborId(items, "a", -1)).toBe("a");
  });

  it("falls back to the first item", () => {
    expect(neighborId(items, null, 1)).toBe("a");
    expect(neighborId(items, "ghost", 1)).toBe("a");
    expect(neighborId([], null, 1)).toBeNull();
  });
});

describe("store label bookkeeping", () => {
  it("optimistic apply then rollback restores the exact prior fields", () => {
    const store = new Store();
    store.update({
      queue: { items: [item("a")], page: 1, page_size: 50, total: 1, pages: 1 },
    });
    const before = store.applyLabelLocally("a", "FIRE");
    expect(store.items()[0]).toMatchObject({ label: "FIRE", source: "HUMAN", pending: false });
    store.rollbackLabel("a", before!);
    expect(store.items()[0]).toMatchObject({ label: null, source: null, pending: true });
  });

  it("clamps overlay controls to configured bounds", () => {
    const store = new Store();
    store.setOverlayThreshold(9000);
    expect(store.state.overlayThreshold).toBe(600);
    store.setOverlayOpacity(-2);
    expect(store.state.overlayOpacity).toBe(0);
    expect(clamp(0.5, 0, 1)).toBe(0.5);
  });

  it("notifies subscribers on every update", () => {
    const store = new Store();
    let calls = 0;
    const unsubscribe = store.subscribe(() => calls++);
    store.update({ banner: "x" });
    store.update({ banner: null });
    unsubscribe();
    store.update({ banner: "y" });
    expect(calls).toBe(2);
  });
});
