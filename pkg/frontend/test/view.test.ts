import { describe, expect, it } from "vitest";
import type { ScoreResponse } from "../src/client.js";
import { applyScore, initialView, render, setThreshold } from "../src/view.js";

function warming(remaining: number): ScoreResponse {
  return { session_id: "s1", status: "warming_up", pairs: 200 - remaining, pairs_remaining: remaining, window_length: 200 };
}

function scored(score: number): ScoreResponse {
  return {
    session_id: "s1", status: "ok", score, pairs: 250,
    window_length: 200, bundled_threshold: 0.4,
  };
}

describe("session view state", () => {
  it("warm-up response sets the remaining counter, no decision yet", () => {
    const view = applyScore(initialView("s1"), warming(120));
    expect(view.warmupRemaining).toBe(120);
    expect(view.decision).toBeNull();
  });

  it("first ok response adopts the bundled threshold and decides", () => {
    const view = applyScore(initialView("s1"), scored(0.8));
    expect(view.threshold).toBe(0.4);
    expect(view.decision).toBe("ACCEPT");
    expect(view.scoreHistory).toEqual([0.8]);
  });

  it("threshold slider re-decides without new events", () => {
    let view = applyScore(initialView("s1"), scored(0.8));
    expect(view.decision).toBe("ACCEPT");
    view = setThreshold(view, 0.9);
    expect(view.decision).toBe("REJECT");
    expect(view.scoreHistory).toEqual([0.8]); // untouched
  });

  it("score history accumulates across polls", () => {
    let view = initialView("s1");
    for (const s of [0.5, 0.6, 0.7]) view = applyScore(view, scored(s));
    expect(view.scoreHistory).toEqual([0.5, 0.6, 0.7]);
    expect(view.lastScore).toBe(0.7);
  });
});

describe("render", () => {
  it("shows the warm-up banner until the first full window", () => {
    const root = document.createElement("div");
    render(applyScore(initialView("s1"), warming(42)), root);
    expect(root.querySelector(".banner.warmup")?.textContent).toContain("42");
    expect(root.querySelector(".banner.decision")).toBeNull();
  });

  it("shows the decision banner once scored", () => {
    const root = document.createElement("div");
    render(applyScore(initialView("s1"), scored(0.9)), root);
    expect(root.querySelector(".banner.decision.accept")?.textContent).toBe("ACCEPT");
  });

  it("shows the disconnected banner when the service is down", () => {
    const root = document.createElement("div");
    render({ ...initialView("s1"), disconnected: true }, root);
    expect(root.querySelector(".banner.disconnected")).not.toBeNull();
  });

  it("threshold slider reflects the current threshold", () => {
    const root = document.createElement("div");
    render(setThreshold(applyScore(initialView("s1"), scored(0.9)), 1.25), root);
    const slider = root.querySelector<HTMLInputElement>("#threshold-slider");
    expect(slider?.value).toBe("1.25");
  });
});
