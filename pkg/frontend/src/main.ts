/** Page wiring: capture from the textarea, batch to the service, poll and render. */

import { KeyEventCapture } from "./events.js";
import { ScoringClient } from "./client.js";
import { applyScore, initialView, render, setThreshold, type SessionView } from "./view.js";

const POLL_INTERVAL_MS = 1000;

export function bootstrap(root: HTMLElement, baseUrl = ""): void {
  const sessionId = `live-${Date.now().toString(36)}`;
  const area = root.querySelector<HTMLTextAreaElement>("#capture-area");
  const panel = root.querySelector<HTMLElement>("#panel");
  const questionSelect = root.querySelector<HTMLSelectElement>("#question-select");
  if (!area || !panel) throw new Error("capture page markup missing");

  let view: SessionView = initialView(sessionId);
  const client = new ScoringClient(baseUrl);
  const capture = new KeyEventCapture({ sessionId, userId: "live", questionIndex: "1.1" });
  capture.onEvent((ev) => {
    client.enqueue(ev);
    view = { ...view, eventCount: view.eventCount + 1 };
    render(view, panel);
  });
  capture.attach(area);
  questionSelect?.addEventListener("change", () => capture.setQuestionIndex(questionSelect.value));
  client.start();

  setInterval(async () => {
    const res = await client.decision(sessionId, view.decision === null ? undefined : view.threshold);
    view = { ...view, disconnected: client.disconnected };
    if (res) view = applyScore(view, res);
    render(view, panel);
    wireSlider();
  }, POLL_INTERVAL_MS);

  const wireSlider = () => {
    const slider = panel.querySelector<HTMLInputElement>("#threshold-slider");
    slider?.addEventListener("input", () => {
      view = setThreshold(view, Number(slider.value));
      render(view, panel);
      wireSlider();
    });
  };
  render(view, panel);
  wireSlider();
}

declare global {
  interface Window {
    kdauthBootstrap?: typeof bootstrap;
  }
}
if (typeof window !== "undefined") {
  window.kdauthBootstrap = bootstrap;
}
