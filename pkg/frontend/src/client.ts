/**
 * Network layer: batches captured events to the scoring service every
 * 500 ms and polls the score/decision endpoints.  The service is the single
 * source of truth — no feature extraction or scoring happens client-side.
 * When the service is unreachable, events stay buffered locally and are
 * retried on the next flush.
 */

import type { WireEvent } from "./events.js";

export const BATCH_INTERVAL_MS = 500;

export interface ScoreResponse {
  session_id: string;
  status: "ok" | "warming_up";
  score?: number;
  decision?: "ACCEPT" | "REJECT";
  threshold?: number;
  bundled_threshold?: number;
  pairs: number;
  pairs_remaining?: number;
  window_length: number;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ScoringClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private buffer: WireEvent[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;
  /** true after the last flush or poll failed; cleared on success */
  disconnected = false;
  /** events the service has acknowledged (per the last flush response) */
  acknowledged = 0;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  enqueue(ev: WireEvent): void {
    this.buffer.push(ev);
  }

  get pending(): number {
    return this.buffer.length;
  }

  start(): void {
    if (this.timer !== null) return;
    this.timer = setInterval(() => void this.flush(), BATCH_INTERVAL_MS);
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  /** Send all buffered events in one batch; on failure keep them buffered. */
  async flush(): Promise<boolean> {
    if (this.buffer.length === 0) return true;
    const batch = this.buffer;
    this.buffer = [];
    try {
      const res = await this.fetchImpl(`${this.baseUrl}/events`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(batch),
      });
      if (!res.ok) throw new Error(`POST /events -> ${res.status}`);
      const body = (await res.json()) as { accepted: number };
      this.acknowledged += body.accepted;
      this.disconnected = false;
      return true;
    } catch {
      this.buffer = batch.concat(this.buffer); // retry on the next flush
      this.disconnected = true;
      return false;
    }
  }

  async score(sessionId: string): Promise<ScoreResponse | null> {
    return this.get(`/score?session=${encodeURIComponent(sessionId)}`);
  }

  async decision(sessionId: string, threshold?: number): Promise<ScoreResponse | null> {
    const extra = threshold === undefined ? "" : `&threshold=${threshold}`;
    return this.get(`/decision?session=${encodeURIComponent(sessionId)}${extra}`);
  }

  private async get(path: string): Promise<ScoreResponse | null> {
    try {
      const res = await this.fetchImpl(`${this.baseUrl}${path}`);
      if (!res.ok) throw new Error(`GET ${path} -> ${res.status}`);
      this.disconnected = false;
      return (await res.json()) as ScoreResponse;
    } catch {
      this.disconnected = true;
      return null;
    }
  }
}
