/** Wire types for the review service API. */

export interface SampleView {
  sample_id: string;
  pair_id: string;
  question: string;
  options: string[];
  answer: string;
  modality: string;
  severity: string;
  type: string | null;
  image_path: string;
  clean_image: boolean;
  preview_type: string;
  t_default: number;
  t_l1: number;
  t_l2: number;
}

export interface QueuePage {
  total: number;
  page: number;
  page_size: number;
  pages: number;
  samples: SampleView[];
}

export const DISCARD_REASONS = [
  "poor_baseline",
  "modality_mismatch",
  "severe_over_degradation",
  "insufficient_L2",
  "clinically_irrelevant",
] as const;

export type DiscardReason = (typeof DISCARD_REASONS)[number];

export interface ReviewBody {
  sample_id: string;
  action: "retain" | "discard";
  reason?: DiscardReason;
  annotator: string;
}

export interface ThresholdBody {
  type: string;
  modality: string;
  image: string;
  t_l1: number;
  t_l2: number;
  annotator: string;
}
