/** Wire types for the review service API (see docs/format.md). */

export type LabelValue = "FIRE" | "NO_FIRE" | "NEEDS_REVIEW" | "DISCARD";
export type LabelText = "fire" | "no_fire" | "discard";
export type QueueFilter = "pending" | "all" | "fire" | "no_fire" | "needs_review" | "discard";
export type ViewMode = "side_by_side" | "overlay";

export interface PairSummary {
  pair_id: string;
  timestamp: string;
  max_temp_c: number;
  label: LabelValue | null;
  source: "AUTO" | "HUMAN" | null;
  pending: boolean;
}

export interface QueuePage {
  items: PairSummary[];
  page: number;
  page_size: number;
  total: number;
  pages: number;
}

export interface PairStats {
  width: number;
  height: number;
  min_temp_c: number;
  max_temp_c: number;
  mean_temp_c: number;
}

export interface PairDetail {
  pair_id: string;
  timestamp: string;
  camera_model: string;
  delta_t_s: number;
  rgb_path: string;
  thermal_path: string;
  label: LabelValue | null;
  source: "AUTO" | "HUMAN" | null;
  stats: PairStats;
}

export interface LabelRecordJson {
  pair_id: string;
  label: LabelValue;
  source: "AUTO" | "HUMAN";
  max_temp_c: number;
  decided_at: string;
}

export interface Progress {
  total: number;
  fire: number;
  no_fire: number;
  needs_review: number;
  discard: number;
  unlabeled: number;
  human: number;
  auto: number;
  pending: number;
}

export interface Histogram {
  pair_id: string;
  min_temp_c: number;
  max_temp_c: number;
  bin_width_c: number;
  bins: number[];
}

export interface PrelabelResult {
  counts: {
    fire: number;
    no_fire: number;
    needs_review: number;
    discard: number;
    unlabeled: number;
  };
  changed: number;
}
