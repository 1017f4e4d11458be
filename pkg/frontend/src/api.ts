/** Typed client over the documented review-service endpoints.
 *
 * The UI talks to exactly four paths: /api/queue, /api/preview,
 * /api/review, /api/threshold. Nothing else is ever requested.
 */

import type { QueuePage, ReviewBody, ThresholdBody } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async fetchQueue(annotator: string, pageSize = 1): Promise<QueuePage> {
    const params = new URLSearchParams({
      annotator,
      status: "pending",
      page: "0",
      page_size: String(pageSize),
    });
    const resp = await this.fetchImpl(`${this.baseUrl}/api/queue?${params}`);
    if (!resp.ok) throw new ApiError(resp.status, `queue fetch failed (${resp.status})`);
    return (await resp.json()) as QueuePage;
  }

  previewUrl(pairId: string, type: string, t: number): string {
    const params = new URLSearchParams({
      image: pairId,
      type,
      t: String(t),
    });
    return `${this.baseUrl}/api/preview?${params}`;
  }

  async submitReview(body: ReviewBody): Promise<void> {
    const resp = await this.fetchImpl(`${this.baseUrl}/api/review`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      const detail = await resp.text().catch(() => "");
      throw new ApiError(resp.status, `review rejected (${resp.status}): ${detail}`);
    }
  }

  async submitThreshold(body: ThresholdBody): Promise<void> {
    const resp = await this.fetchImpl(`${this.baseUrl}/api/threshold`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      const detail = await resp.text().catch(() => "");
      throw new ApiError(resp.status, `threshold rejected (${resp.status}): ${detail}`);
    }
  }
}
