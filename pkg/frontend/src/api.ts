/** Typed fetch client for the review service. */

import type {
  Histogram,
  LabelRecordJson,
  LabelText,
  PairDetail,
  PrelabelResult,
  Progress,
  QueueFilter,
  QueuePage,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let code = "HttpError";
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    if (body && typeof body.code === "string") {
      code = body.code;
      message = body.message ?? message;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, code, message);
}

export class ReviewApi {
  constructor(readonly base: string = "") {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await fetch(`${this.base}${path}`);
    if (!response.ok) await parseError(response);
    return response.json() as Promise<T>;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(`${this.base}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) await parseError(response);
    return response.json() as Promise<T>;
  }

  listPairs(filter: QueueFilter, page = 1, pageSize = 500): Promise<QueuePage> {
    return this.getJson(`/api/pairs?status=${filter}&page=${page}&page_size=${pageSize}`);
  }

  getPair(pairId: string): Promise<PairDetail> {
    return this.getJson(`/api/pairs/${pairId}`);
  }

  histogram(pairId: string): Promise<Histogram> {
    return this.getJson(`/api/pairs/${pairId}/histogram`);
  }

  progress(): Promise<Progress> {
    return this.getJson("/api/progress");
  }

  submitLabel(pairId: string, label: LabelText): Promise<LabelRecordJson> {
    return this.postJson(`/api/pairs/${pairId}/label`, { label });
  }

  prelabel(noFireMax?: number, fireMin?: number): Promise<PrelabelResult> {
    const body: Record<string, number> = {};
    if (noFireMax !== undefined) body.no_fire_max = noFireMax;
    if (fireMin !== undefined) body.fire_min = fireMin;
    return this.postJson("/api/prelabel", body);
  }

  rgbUrl(pairId: string): string {
    return `${this.base}/api/pairs/${pairId}/rgb.jpg`;
  }

  thermalUrl(pairId: string): string {
    return `${this.base}/api/pairs/${pairId}/thermal.jpg`;
  }

  overlayUrl(pairId: string, threshold: number, opacity: number): string {
    return `${this.base}/api/pairs/${pairId}/overlay.jpg?threshold=${threshold}&opacity=${opacity}`;
  }
}
