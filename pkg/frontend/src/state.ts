/** Review session state machine, independent of the DOM.
 *
 * Holds the current sample, the slider strength, and the decision draft.
 * Submission stays disabled until the draft is valid (an action, plus a
 * reason when discarding); threshold marks must satisfy t_L1 < t_L2 before
 * any request leaves the client. Preview requests are debounced with the
 * latest slider value winning.
 */

import type { ApiClient } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import { DISCARD_REASONS, type DiscardReason, type SampleView } from "./types.js";

export type Phase = "loading" | "reviewing" | "done" | "error";

export interface DecisionDraft {
  action: "retain" | "discard" | null;
  reason: DiscardReason | null;
}

export interface ThresholdDraft {
  tL1: number | null;
  tL2: number | null;
}

export interface SessionSnapshot {
  phase: Phase;
  sample: SampleView | null;
  sliderT: number;
  draft: DecisionDraft;
  thresholds: ThresholdDraft;
  remaining: number;
  errorMessage: string | null;
  inlineError: string | null;
  cleanUrl: string | null;
  previewUrl: string | null;
}

export interface SessionOptions {
  debounceMs?: number;
  onChange?: (snapshot: SessionSnapshot) => void;
  /** Called (debounced) whenever a fresh degraded preview should load. */
  onPreview?: (url: string) => void;
}

const DEFAULT_DEBOUNCE_MS = 150;

export class ReviewSession {
  private phase: Phase = "loading";
  private sample: SampleView | null = null;
  private sliderT = 0;
  private draft: DecisionDraft = { action: null, reason: null };
  private thresholds: ThresholdDraft = { tL1: null, tL2: null };
  private remaining = 0;
  private errorMessage: string | null = null;
  private inlineError: string | null = null;
  private submitting = false;
  private readonly schedulePreview: Debounced<[number]>;
  private readonly onChange: (snapshot: SessionSnapshot) => void;
  private readonly onPreview: (url: string) => void;

  constructor(
    private api: ApiClient,
    private annotator: string,
    options: SessionOptions = {},
  ) {
    this.onChange = options.onChange ?? (() => {});
    this.onPreview = options.onPreview ?? (() => {});
    this.schedulePreview = debounce((t: number) => {
      if (this.sample) {
        this.onPreview(this.api.previewUrl(this.sample.pair_id, this.sample.preview_type, t));
      }
    }, options.debounceMs ?? DEFAULT_DEBOUNCE_MS);
  }

  snapshot(): SessionSnapshot {
    const sample = this.sample;
    return {
      phase: this.phase,
      sample,
      sliderT: this.sliderT,
      draft: { ...this.draft },
      thresholds: { ...this.thresholds },
      remaining: this.remaining,
      errorMessage: this.errorMessage,
      inlineError: this.inlineError,
      cleanUrl: sample
        ? this.api.previewUrl(sample.pair_id, sample.preview_type, 0)
        : null,
      previewUrl: sample
        ? this.api.previewUrl(sample.pair_id, sample.preview_type, this.sliderT)
        : null,
    };
  }

  async start(): Promise<void> {
    await this.fetchNext();
  }

  async fetchNext(): Promise<void> {
    this.phase = "loading";
    this.errorMessage = null;
    this.emit();
    try {
      const page = await this.api.fetchQueue(this.annotator);
      this.remaining = page.total;
      if (page.total === 0 || page.samples.length === 0) {
        this.sample = null;
        this.phase = "done";
      } else {
        this.sample = page.samples[0];
        this.sliderT = this.sample.t_default;
        this.draft = { action: null, reason: null };
        this.thresholds = { tL1: null, tL2: null };
        this.inlineError = null;
        this.phase = "reviewing";
      }
    } catch (err) {
      this.phase = "error";
      this.errorMessage = err instanceof Error ? err.message : String(err);
    }
    this.emit();
  }

  /** Clamp to [0, 1] and schedule exactly one debounced preview request. */
  setSlider(t: number): void {
    this.sliderT = Math.min(1, Math.max(0, t));
    this.schedulePreview(this.sliderT);
    this.emit();
  }

  setAction(action: "retain" | "discard"): void {
    this.draft.action = action;
    if (action === "retain") this.draft.reason = null;
    this.inlineError = null;
    this.emit();
  }

  setReason(reason: DiscardReason): void {
    if (!DISCARD_REASONS.includes(reason)) return;
    this.draft.reason = reason;
    this.inlineError = null;
    this.emit();
  }

  setReasonByIndex(index: number): void {
    const reason = DISCARD_REASONS[index];
    if (reason && this.draft.action === "discard") this.setReason(reason);
  }

  markThresholdL1(): void {
    this.thresholds.tL1 = this.sliderT;
    this.emit();
  }

  markThresholdL2(): void {
    this.thresholds.tL2 = this.sliderT;
    this.emit();
  }

  /** Ordering violation message, or null when thresholds are absent/valid. */
  thresholdError(): string | null {
    const { tL1, tL2 } = this.thresholds;
    if (tL1 === null && tL2 === null) return null;
    if (tL1 === null || tL2 === null) return "mark both L1 and L2 thresholds";
    if (!(tL1 > 0 && tL1 < tL2 && tL2 <= 1)) {
      return `thresholds must satisfy 0 < L1 < L2 <= 1 (got ${tL1.toFixed(2)}, ${tL2.toFixed(2)})`;
    }
    return null;
  }

  private thresholdsReady(): boolean {
    return this.thresholds.tL1 !== null || this.thresholds.tL2 !== null;
  }

  /** Submit stays disabled until the draft is valid. */
  canSubmit(): boolean {
    if (this.phase !== "reviewing" || this.submitting || !this.sample) return false;
    if (this.draft.action === null) return false;
    if (this.draft.action === "discard" && this.draft.reason === null) return false;
    if (this.thresholdsReady() && this.thresholdError() !== null) return false;
    return true;
  }

  /** POST the decision (and thresholds when captured), then auto-advance.
   * No request leaves when the draft is invalid.
   */
  async submit(): Promise<boolean> {
    if (!this.canSubmit() || !this.sample) return false;
    const sample = this.sample;
    this.submitting = true;
    this.emit();
    try {
      if (this.thresholdsReady()) {
        await this.api.submitThreshold({
          type: sample.preview_type,
          modality: sample.modality,
          image: sample.pair_id,
          t_l1: this.thresholds.tL1 as number,
          t_l2: this.thresholds.tL2 as number,
          annotator: this.annotator,
        });
      }
      const body = {
        sample_id: sample.sample_id,
        action: this.draft.action as "retain" | "discard",
        annotator: this.annotator,
        ...(this.draft.action === "discard"
          ? { reason: this.draft.reason as DiscardReason }
          : {}),
      };
      await this.api.submitReview(body);
    } catch (err) {
      // surface rejections inline; never drop them silently
      this.inlineError = err instanceof Error ? err.message : String(err);
      this.submitting = false;
      this.emit();
      return false;
    }
    this.submitting = false;
    await this.fetchNext();
    return true;
  }

  /** Retain-and-advance, the "Next" button semantics. */
  async retainAndNext(): Promise<boolean> {
    this.setAction("retain");
    return this.submit();
  }

  dispose(): void {
    this.schedulePreview.cancel();
  }

  private emit(): void {
    this.onChange(this.snapshot());
  }
}
