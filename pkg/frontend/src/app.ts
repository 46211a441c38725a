/** DOM wiring for the review loop: queue, viewer, shortcuts, batch prelabel.
 *
 * The skeleton is built once; render() only patches text, classes, and the
 * queue list. Images change only on selection or slider moves so the viewer
 * does not flicker on unrelated state updates.
 */

import { ApiError, ReviewApi } from "./api";
import { debounce, LatestWins } from "./debounce";
import { drawHistogram } from "./histogram";
import { attachKeyboard } from "./keyboard";
import { neighborId, nextPendingAfter, Store } from "./state";
import type { LabelText, PairSummary, QueueFilter } from "./types";

const LABEL_BADGES: Record<string, string> = {
  FIRE: "badge fire",
  NO_FIRE: "badge no-fire",
  NEEDS_REVIEW: "badge review",
  DISCARD: "badge discard",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className = "", text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

const SKELETON = `
<header>
  <h1>ember review</h1>
  <div id="progress-badges"></div>
  <div id="prelabel-box">
    <label>no-fire &lt; <input id="prelabel-nofire" type="number" value="80" size="4"></label>
    <label>fire &gt; <input id="prelabel-fire" type="number" value="200" size="4"></label>
    <button id="prelabel-run">batch prelabel</button>
    <span id="prelabel-result"></span>
  </div>
  <select id="queue-filter">
    <option value="pending">pending</option>
    <option value="all">all</option>
    <option value="fire">fire</option>
    <option value="no_fire">no fire</option>
    <option value="needs_review">needs review</option>
    <option value="discard">discard</option>
  </select>
</header>
<div id="banner" hidden><span id="banner-text"></span><button id="banner-retry">retry</button></div>
<main>
  <ul id="queue"></ul>
  <section id="viewer">
    <div id="viewer-empty">no pair selected</div>
    <div id="viewer-body" hidden>
      <div id="mode-toggle">
        <button id="mode-side" class="active">side by side</button>
        <button id="mode-overlay">overlay</button>
      </div>
      <div id="panel-side">
        <figure><img id="img-rgb" alt="aligned RGB"><figcaption>RGB</figcaption></figure>
        <figure><img id="img-thermal" alt="thermal"><figcaption>thermal</figcaption></figure>
      </div>
      <div id="panel-overlay" hidden>
        <img id="img-overlay" alt="overlay">
        <div id="overlay-controls">
          <label>threshold <input id="threshold-slider" type="range" min="0" max="600" step="1">
            <span id="threshold-value"></span></label>
          <label>opacity <input id="opacity-slider" type="range" min="0" max="100" step="1">
            <span id="opacity-value"></span></label>
        </div>
      </div>
      <div id="detail"></div>
      <canvas id="histogram" width="512" height="120"></canvas>
    </div>
  </section>
</main>
<footer>F fire &middot; N no fire &middot; D discard &middot; J/K or arrows move &middot; O overlay</footer>
`;

export interface App {
  store: Store;
  refresh(): Promise<void>;
  select(pairId: string): Promise<void>;
  labelCurrent(label: LabelText): Promise<void>;
  runPrelabel(): Promise<void>;
  lastOverlayUrl: string | null;
  destroy(): void;
}

export function mountApp(root: HTMLElement, api: ReviewApi): App {
  root.innerHTML = SKELETON;
  const store = new Store();
  const get = <T extends HTMLElement>(id: string) => root.querySelector(`#${id}`) as T;

  const queueList = get<HTMLUListElement>("queue");
  const banner = get<HTMLDivElement>("banner");
  const bannerText = get<HTMLSpanElement>("banner-text");
  const badges = get<HTMLDivElement>("progress-badges");
  const viewerEmpty = get<HTMLDivElement>("viewer-empty");
  const viewerBody = get<HTMLDivElement>("viewer-body");
  const imgRgb = get<HTMLImageElement>("img-rgb");
  const imgThermal = get<HTMLImageElement>("img-thermal");
  const imgOverlay = get<HTMLImageElement>("img-overlay");
  const thresholdSlider = get<HTMLInputElement>("threshold-slider");
  const thresholdValue = get<HTMLSpanElement>("threshold-value");
  const opacitySlider = get<HTMLInputElement>("opacity-slider");
  const opacityValue = get<HTMLSpanElement>("opacity-value");
  const detail = get<HTMLDivElement>("detail");
  const histogramCanvas = get<HTMLCanvasElement>("histogram");
  const prelabelResult = get<HTMLSpanElement>("prelabel-result");

  const detailTickets = new LatestWins();
  const overlayTickets = new LatestWins();
  const app: App = {
    store,
    refresh,
    select,
    labelCurrent,
    runPrelabel,
    lastOverlayUrl: null,
    destroy: () => detachKeys(),
  };

  function rowFor(item: PairSummary): HTMLLIElement {
    const row = el("li", item.pair_id === store.state.currentId ? "row selected" : "row");
    row.dataset.pairId = item.pair_id;
    row.append(
      el("span", "stamp", item.timestamp.replace("T", " ").slice(0, 19)),
      el("span", "temp", `${item.max_temp_c.toFixed(1)} degC`),
      el(
        "span",
        item.label ? LABEL_BADGES[item.label] : "badge none",
        item.label ? `${item.label}${item.source === "HUMAN" ? " *" : ""}` : "unlabeled",
      ),
    );
    row.addEventListener("click", () => void select(item.pair_id));
    return row;
  }

  function render(): void {
    const state = store.state;
    banner.hidden = state.banner === null;
    bannerText.textContent = state.banner ?? "";

    const progress = state.progress;
    badges.replaceChildren(
      ...(progress
        ? [
            el("span", "badge total", `total ${progress.total}`),
            el("span", "badge pending-badge", `pending ${progress.pending}`),
            el("span", "badge fire", `fire ${progress.fire}`),
            el("span", "badge no-fire", `no fire ${progress.no_fire}`),
            el("span", "badge review", `review ${progress.needs_review}`),
            el("span", "badge discard", `discard ${progress.discard}`),
          ]
        : []),
    );

    const items = store.items();
    if (state.queue !== null && items.length === 0) {
      queueList.replaceChildren(el("li", "empty-state", "queue is empty - nothing to review"));
    } else {
      queueList.replaceChildren(...items.map(rowFor));
    }

    const current = store.current();
    viewerEmpty.hidden = current !== null;
    viewerBody.hidden = current === null;
    get<HTMLButtonElement>("mode-side").className = state.mode === "side_by_side" ? "active" : "";
    get<HTMLButtonElement>("mode-overlay").className = state.mode === "overlay" ? "active" : "";
    get<HTMLDivElement>("panel-side").hidden = state.mode !== "side_by_side";
    get<HTMLDivElement>("panel-overlay").hidden = state.mode !== "overlay";
    thresholdSlider.value = String(state.overlayThreshold);
    thresholdValue.textContent = `${state.overlayThreshold} degC`;
    opacitySlider.value = String(Math.round(state.overlayOpacity * 100));
    opacityValue.textContent = state.overlayOpacity.toFixed(2);
  }

  store.subscribe(render);

  async function refresh(): Promise<void> {
    try {
      const [progress, queue] = await Promise.all([
        api.progress(),
        api.listPairs(store.state.filter),
      ]);
      store.update({ progress, queue, banner: null });
      const items = store.items();
      if (!items.some((i) => i.pair_id === store.state.currentId)) {
        const next = nextPendingAfter(items, null) ?? items[0]?.pair_id ?? null;
        if (next !== null) await select(next);
        else store.update({ currentId: null });
      }
    } catch (error) {
      store.update({ banner: `cannot reach review service: ${describe(error)}` });
    }
  }

  async function select(pairId: string): Promise<void> {
    store.update({ currentId: pairId });
    imgRgb.src = api.rgbUrl(pairId);
    imgThermal.src = api.thermalUrl(pairId);
    refreshOverlayImage();
    const ticket = detailTickets.next();
    try {
      const [info, histogram] = await Promise.all([api.getPair(pairId), api.histogram(pairId)]);
      if (!detailTickets.isCurrent(ticket)) return;   // a later selection won
      detail.textContent =
        `${info.pair_id} | ${info.timestamp} | ${info.camera_model} | ` +
        `max ${info.stats.max_temp_c.toFixed(1)} degC | ` +
        `${info.label ?? "unlabeled"}${info.source ? ` (${info.source})` : ""}`;
      drawHistogram(histogramCanvas, histogram);
    } catch (error) {
      if (detailTickets.isCurrent(ticket)) {
        store.update({ banner: `failed to load pair: ${describe(error)}` });
      }
    }
  }

  function refreshOverlayImage(): void {
    const pairId = store.state.currentId;
    if (pairId === null || store.state.mode !== "overlay") return;
    const ticket = overlayTickets.next();
    const url = api.overlayUrl(pairId, store.state.overlayThreshold, store.state.overlayOpacity);
    if (overlayTickets.isCurrent(ticket)) {
      app.lastOverlayUrl = url;
      imgOverlay.src = url;
    }
  }

  const debouncedOverlay = debounce(refreshOverlayImage, 150);

  async function labelCurrent(label: LabelText): Promise<void> {
    const pairId = store.state.currentId;
    if (pairId === null || store.state.labelInFlight) return;   // in-flight dedup
    const rollback = store.applyLabelLocally(
      pairId, label.toUpperCase() as PairSummary["label"],
    );
    store.update({ labelInFlight: true });
    try {
      await api.submitLabel(pairId, label);
      const nextId = nextPendingAfter(store.items(), pairId);
      const progress = await api.progress();
      store.update({ progress, labelInFlight: false });
      if (store.state.filter !== "all") {
        try {
          const queue = await api.listPairs(store.state.filter);
          store.update({ queue });
        } catch {
          // keep the optimistic list; next refresh reconciles
        }
      }
      if (nextId !== null) await select(nextId);
    } catch (error) {
      if (rollback) store.rollbackLabel(pairId, rollback);
      store.update({
        labelInFlight: false,
        banner: `label rejected: ${describe(error)}`,
      });
    }
  }

  async function runPrelabel(): Promise<void> {
    const noFire = Number(get<HTMLInputElement>("prelabel-nofire").value);
    const fire = Number(get<HTMLInputElement>("prelabel-fire").value);
    try {
      const result = await api.prelabel(noFire, fire);
      prelabelResult.textContent =
        `fire ${result.counts.fire} / no fire ${result.counts.no_fire} / ` +
        `review ${result.counts.needs_review} (${result.changed} changed)`;
      await refresh();
    } catch (error) {
      store.update({ banner: `prelabel failed: ${describe(error)}` });
    }
  }

  get<HTMLButtonElement>("banner-retry").addEventListener("click", () => void refresh());
  get<HTMLButtonElement>("prelabel-run").addEventListener("click", () => void runPrelabel());
  get<HTMLSelectElement>("queue-filter").addEventListener("change", (event) => {
    store.update({ filter: (event.target as HTMLSelectElement).value as QueueFilter });
    void refresh();
  });
  get<HTMLButtonElement>("mode-side").addEventListener("click", () => {
    store.update({ mode: "side_by_side" });
  });
  get<HTMLButtonElement>("mode-overlay").addEventListener("click", () => {
    store.update({ mode: "overlay" });
    refreshOverlayImage();
  });
  thresholdSlider.addEventListener("input", (event) => {
    store.setOverlayThreshold(Number((event.target as HTMLInputElement).value));
    debouncedOverlay();
  });
  opacitySlider.addEventListener("input", (event) => {
    store.setOverlayOpacity(Number((event.target as HTMLInputElement).value) / 100);
    debouncedOverlay();
  });

  const detachKeys = attachKeyboard(root.ownerDocument, {
    onLabel: (label) => void labelCurrent(label),
    onNext: () => {
      const next = neighborId(store.items(), store.state.currentId, 1);
      if (next !== null && next !== store.state.currentId) void select(next);
    },
    onPrevious: () => {
      const prev = neighborId(store.items(), store.state.currentId, -1);
      if (prev !== null && prev !== store.state.currentId) void select(prev);
    },
    onToggleMode: () => {
      store.update({ mode: store.state.mode === "overlay" ? "side_by_side" : "overlay" });
      refreshOverlayImage();
    },
  });

  render();
  return app;
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  return error instanceof Error ? error.message : String(error);
}
