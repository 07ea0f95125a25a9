/**
 * Session view state and DOM rendering: event counter, warm-up banner,
 * rolling score history, decision banner and a threshold slider.  The
 * threshold slider re-evaluates the decision locally from the last score —
 * no new events or requests are needed to see its effect.
 */

import type { ScoreResponse } from "./client.js";

export interface SessionView {
  sessionId: string;
  eventCount: number;
  warmupRemaining: number | null; // null once the first full window exists
  scoreHistory: number[];
  lastScore: number | null;
  threshold: number;
  decision: "ACCEPT" | "REJECT" | null;
  disconnected: boolean;
}

export function initialView(sessionId: string, threshold = 0): SessionView {
  return {
    sessionId,
    eventCount: 0,
    warmupRemaining: null,
    scoreHistory: [],
    lastScore: null,
    threshold,
    decision: null,
    disconnected: false,
  };
}

export function applyScore(view: SessionView, res: ScoreResponse): SessionView {
  const next = { ...view, scoreHistory: [...view.scoreHistory] };
  if (res.status === "warming_up") {
    next.warmupRemaining = res.pairs_remaining ?? null;
    return next;
  }
  next.warmupRemaining = 0;
  if (typeof res.score === "number") {
    next.lastScore = res.score;
    next.scoreHistory.push(res.score);
  }
  if (typeof res.bundled_threshold === "number" && view.decision === null) {
    next.threshold = res.bundled_threshold;
  }
  next.decision = decide(next);
  return next;
}

export function setThreshold(view: SessionView, threshold: number): SessionView {
  const next = { ...view, threshold };
  next.decision = decide(next);
  return next;
}

function decide(view: SessionView): "ACCEPT" | "REJECT" | null {
  if (view.lastScore === null) return null;
  return view.lastScore >= view.threshold ? "ACCEPT" : "REJECT";
}

export function render(view: SessionView, root: HTMLElement): void {
  const warming = view.warmupRemaining !== null && view.warmupRemaining > 0;
  const banner = view.disconnected
    ? `<div class="banner disconnected">service unreachable — buffering locally</div>`
    : warming
      ? `<div class="banner warmup">warming up — ${view.warmupRemaining} key presses to go</div>`
      : view.decision
        ? `<div class="banner decision ${view.decision.toLowerCase()}">${view.decision}</div>`
        : "";
  const history = view.scoreHistory
    .slice(-60)
    .map((s) => `<span class="tick" style="height:${sparkHeight(view, s)}px"></span>`)
    .join("");
  root.innerHTML = `
    <div class="session">session <code>${view.sessionId}</code> — ${view.eventCount} events</div>
    ${banner}
    <div class="score">score: ${view.lastScore === null ? "—" : view.lastScore.toFixed(4)}</div>
    <div class="history">${history}</div>
    <label class="threshold">threshold
      <input type="range" min="-5" max="5" step="0.01" value="${view.threshold}" id="threshold-slider">
      <span>${view.threshold.toFixed(2)}</span>
    </label>`;
}

function sparkHeight(view: SessionView, score: number): number {
  const all = view.scoreHistory;
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  if (hi === lo) return 20;
  return 4 + Math.round((36 * (score - lo)) / (hi - lo));
}
