// @vitest-environment jsdom
//
// Scripted end-to-end review: a real 50-pair fixture workspace served by the
// real Python review service, driven keyboard-only through the mounted DOM.
// Asserts the final labels.csv matches the intended labels exactly, and that
// batch-prelabel counts shown in the UI equal a core-library sweep.
import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ReviewApi } from "../src/api";
import { mountApp, type App } from "../src/app";
import type { LabelText } from "../src/types";

const PAIRS = 50;
const SETUP_TIMEOUT = 300_000;
const TEST_TIMEOUT = 240_000;

let root: string;
let workspace: string;
let server: ChildProcess;
let base: string;
let app: App;

function py(args: string[], input?: string): string {
  return execFileSync("python3", args, {
    encoding: "utf8",
    input,
    timeout: SETUP_TIMEOUT,
  });
}

async function waitFor(
  predicate: () => boolean, what: string, timeoutMs = 15_000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await new Promise((resolve) => setTimeout(resolve, 10));
  }
  throw new Error(`timed out waiting for ${what}`);
}

function press(key: string): void {
  document.dispatchEvent(new KeyboardEvent("keydown", { key, bubbles: true }));
}

beforeAll(async () => {
  root = mkdtempSync(join(tmpdir(), "emberkit-ui-e2e-"));
  py([
    "-m", "emberkit.cli", "fixtures", "--out", root,
    "--image-pairs", String(PAIRS), "--video-pairs", "0", "--nadir-frames", "2",
  ]);
  workspace = join(root, "out");
  py(["-m", "emberkit.cli", "sort", "--input", join(root, "raw"), "--workspace", workspace]);

  const port = 20000 + Math.floor(Math.random() * 20000);
  base = `http://127.0.0.1:${port}`;
  server = spawn("python3", [
    "-c",
    [
      "import uvicorn",
      "from emberkit.service import create_app",
      `uvicorn.run(create_app(${JSON.stringify(workspace)}), host="127.0.0.1", port=${port}, log_level="error")`,
    ].join("\n"),
  ], { stdio: "ignore" });

  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const response = await fetch(`${base}/api/progress`);
      if (response.ok) break;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("review service did not start");
    await new Promise((resolve) => setTimeout(resolve, 100));
  }

  document.body.innerHTML = '<div id="app"></div>';
  app = mountApp(document.getElementById("app")!, new ReviewApi(base));
  await app.refresh();
}, SETUP_TIMEOUT);

afterAll(() => {
  app?.destroy();
  server?.kill();
  if (root) rmSync(root, { recursive: true, force: true });
});

describe("review loop end to end", () => {
  it("renders the full pending queue with progress badges", async () => {
    await waitFor(() => app.store.items().length === PAIRS, "queue to fill");
    expect(app.store.state.progress?.total).toBe(PAIRS);
    expect(app.store.state.progress?.pending).toBe(PAIRS);
    expect(document.querySelectorAll("#queue .row").length).toBe(PAIRS);
    const badge = document.querySelector("#progress-badges .pending-badge");
    expect(badge?.textContent).toBe(`pending ${PAIRS}`);
  });

  it("batch-prelabel counts shown in the UI equal a core-library sweep", async () => {
    (document.querySelector("#prelabel-run") as HTMLButtonElement).click();
    await waitFor(
      () => (document.querySelector("#prelabel-result")?.textContent ?? "") !== "",
      "prelabel result",
    );
    const text = document.querySelector("#prelabel-result")!.textContent!;
    const match = /fire (\d+) \/ no fire (\d+) \/ review (\d+)/.exec(text);
    expect(match, `unparseable prelabel result: ${text}`).not.toBeNull();

    const sweep = JSON.parse(
      py(["-"], [
        "import json, sys",
        "from emberkit.labeling import ThresholdConfig, auto_label",
        "from emberkit.workspace import Workspace",
        `ws = Workspace(${JSON.stringify(workspace)})`,
        "cfg = ThresholdConfig(80.0, 200.0)",
        "counts = {'FIRE': 0, 'NO_FIRE': 0, 'NEEDS_REVIEW': 0}",
        "for row in ws.image_pairs():",
        "    counts[auto_label(ws.raster(row.pair_id), cfg).label.value] += 1",
        "json.dump(counts, sys.stdout)",
      ].join("\n")),
    );
    expect(Number(match![1])).toBe(sweep.FIRE);
    expect(Number(match![2])).toBe(sweep.NO_FIRE);
    expect(Number(match![3])).toBe(sweep.NEEDS_REVIEW);
  }, TEST_TIMEOUT);

  it("overlay slider drag issues a latest-wins request with the shown threshold", async () => {
    press("o");
    expect(app.store.state.mode).toBe("overlay");
    const slider = document.querySelector("#threshold-slider") as HTMLInputElement;
    for (const value of [120, 150, 180, 200]) {   // rapid drag
      slider.value = String(value);
      slider.dispatchEvent(new Event("input", { bubbles: true }));
    }
    await new Promise((resolve) => setTimeout(resolve, 250));   // debounce window
    expect(app.lastOverlayUrl).toContain("threshold=200");
    expect(document.querySelector("#threshold-value")?.textContent).toBe("200 degC");
    press("o");
  });

  it("labels all 50 pairs keyboard-only and labels.csv matches the plan", async () => {
    const keyFor: Record<LabelText, string> = { fire: "f", no_fire: "n", discard: "d" };
    const plan: LabelText[] = ["fire", "no_fire", "discard"];
    const intended = new Map<string, LabelText>();

    for (let i = 0; i < PAIRS; i++) {
      await waitFor(
        () => {
          const current = app.store.state.currentId;
          return current !== null && !intended.has(current) && !app.store.state.labelInFlight;
        },
        `focus on an unlabeled pair before press ${i}`,
      );
      const pairId = app.store.state.currentId!;
      const label = plan[i % plan.length]!;
      intended.set(pairId, label);
      press(keyFor[label]);
      await waitFor(
        () => app.store.state.progress?.human === i + 1 && !app.store.state.labelInFlight,
        `label ${i + 1} acknowledged`,
      );
    }

    await waitFor(() => app.store.state.progress?.pending === 0, "empty pending queue");
    expect(document.querySelector("#queue .empty-state")?.textContent).toContain("queue is empty");

    const manifest = readFileSync(join(workspace, "labels.csv"), "utf8").trim().split("\n");
    expect(manifest[0]).toBe("pair_id,label,source,max_temp_c,decided_at_iso8601");
    const rows = manifest.slice(1).map((line) => line.split(","));
    expect(rows.length).toBe(PAIRS);
    for (const [pairId, label, source] of rows) {
      const wanted = intended.get(pairId!);
      expect(wanted, `unexpected pair ${pairId} in manifest`).toBeDefined();
      expect(label).toBe(wanted!.toUpperCase());
      expect(source).toBe("HUMAN");
    }
  }, TEST_TIMEOUT);

  it("rapid double-press produces exactly one net label", async () => {
    // everything is labeled; relabel the current row twice in one tick
    const items = app.store.items();
    if (app.store.state.currentId === null && items.length === 0) {
      // pending filter shows nothing; switch to all
      app.store.update({ filter: "all" });
      await app.refresh();
    }
    await waitFor(() => app.store.state.currentId !== null, "a focused pair");
    const pairId = app.store.state.currentId!;
    const before = app.store.state.progress!.human;
    press("f");
    press("f");   // dropped: a label request is already in flight
    await waitFor(() => !app.store.state.labelInFlight, "mutation to settle");
    const manifest = readFileSync(join(workspace, "labels.csv"), "utf8");
    const rows = manifest.trim().split("\n").filter((line) => line.startsWith(pairId));
    expect(rows.length).toBe(1);
    expect(rows[0]).toContain(",FIRE,HUMAN,");
    expect(app.store.state.progress!.human).toBe(before);
  });
});
