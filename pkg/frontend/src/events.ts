/**
 * Keyboard capture: turns DOM keydown/keyup into wire events matching the
 * scoring service's schema.  The physical `code` is captured alongside the
 * produced `key`, so IME-composed characters (e.g. Korean jamo) still carry
 * per-physical-key identity.  Auto-repeat keydowns are filtered client-side
 * so one held key yields one logical down.
 */

export interface WireEvent {
  session_id: string;
  user_id: string;
  phase: number;
  question_index: string;
  key: string;
  code: string;
  kind: "down" | "up";
  timestamp_ms: number;
}

export interface CaptureOptions {
  sessionId: string;
  userId: string;
  phase?: number;
  /** "scenario.question", e.g. "1.1"; switchable mid-session. */
  questionIndex?: string;
  now?: () => number;
}

export class KeyEventCapture {
  private readonly sessionId: string;
  private readonly userId: string;
  private readonly phase: number;
  private questionIndex: string;
  private readonly now: () => number;
  /** codes currently held down; used to drop auto-repeat events */
  private readonly held = new Set<string>();
  private readonly sinks: Array<(ev: WireEvent) => void> = [];
  private detach: (() => void) | null = null;

  constructor(options: CaptureOptions) {
    this.sessionId = options.sessionId;
    this.userId = options.userId;
    this.phase = options.phase ?? 1;
    this.questionIndex = options.questionIndex ?? "1.1";
    this.now = options.now ?? (() => Date.now());
  }

  setQuestionIndex(questionIndex: string): void {
    this.questionIndex = questionIndex;
  }

  onEvent(sink: (ev: WireEvent) => void): void {
    this.sinks.push(sink);
  }

  attach(target: HTMLElement): void {
    const down = (ev: KeyboardEvent) => this.handle(ev, "down");
    const up = (ev: KeyboardEvent) => this.handle(ev, "up");
    target.addEventListener("keydown", down);
    target.addEventListener("keyup", up);
    this.detach = () => {
      target.removeEventListener("keydown", down);
      target.removeEventListener("keyup", up);
    };
  }

  stop(): void {
    this.detach?.();
    this.detach = null;
    this.held.clear();
  }

  handle(ev: KeyboardEvent, kind: "down" | "up"): WireEvent | null {
    if (!ev.code) return null; // synthetic events without physical identity
    if (kind === "down") {
      if (ev.repeat || this.held.has(ev.code)) return null;
      this.held.add(ev.code);
    } else {
      if (!this.held.has(ev.code)) return null; // up without a seen down
      this.held.delete(ev.code);
    }
    const wire: WireEvent = {
      session_id: this.sessionId,
      user_id: this.userId,
      phase: this.phase,
      question_index: this.questionIndex,
      key: ev.key,
      code: ev.code,
      kind,
      timestamp_ms: Math.round(this.now()),
    };
    for (const sink of this.sinks) sink(wire);
    return wire;
  }
}

/** Serialize events to the canonical CSV ingest schema (with header). */
export function toCsv(events: WireEvent[]): string {
  const header = "user_id,phase,question_index,key,code,kind,timestamp_ms";
  const quote = (v: string) => (/[",\n]/.test(v) ? `"${v.replace(/"/g, '""')}"` : v);
  const rows = events.map((e) =>
    [e.user_id, e.phase, e.question_index, quote(e.key), e.code, e.kind, e.timestamp_ms].join(",")
  );
  return [header, ...rows].join("\n") + "\n";
}
