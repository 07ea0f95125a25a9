"""Raw keystroke log parsing, keydown/keyup pairing and continuity flagging.

The canonical log schema has one record per key event:

    user_id,phase,question_index,key,code,kind,timestamp_ms

``question_index`` is a ``x.y`` string where ``x`` is the typing scenario
(1=bona fide, 2=paraphrase, 3=transcribe) and ``y`` the question number
(1..6).  Both CSV (with header) and JSON-lines carry the same field names.
"""

from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import dataclass, replace

SCENARIO_NAMES = {1: "bona", 2: "para", 3: "tsrc"}

CSV_COLUMNS = ["user_id", "phase", "question_index", "key", "code", "kind", "timestamp_ms"]


class LogFormatError(ValueError):
    """Malformed record in a raw keystroke log."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, order=True)
class QuestionIndex:
    scenario: int  # 1=bona fide, 2=paraphrase, 3=transcribe
    question: int  # 1..6

    def __post_init__(self):
        if self.scenario not in (1, 2, 3):
            raise ValueError(f"scenario must be 1, 2 or 3, got {self.scenario}")
        if not 1 <= self.question <= 6:
            raise ValueError(f"question must be in 1..6, got {self.question}")

    @classmethod
    def parse(cls, text):
        parts = str(text).split(".")
        if len(parts) != 2:
            raise ValueError(f"question_index must look like 'x.y', got {text!r}")
        try:
            scenario, question = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"question_index must be numeric 'x.y', got {text!r}") from None
        return cls(scenario, question)

    def __str__(self):
        return f"{self.scenario}.{self.question}"


@dataclass(frozen=True)
class RawKeyEvent:
    user_id: str
    phase: int
    question_index: QuestionIndex
    key: str
    code: str
    kind: str  # "down" | "up"
    timestamp: int  # ms since epoch

    def __post_init__(self):
        if self.kind not in ("down", "up"):
            raise ValueError(f"kind must be 'down' or 'up', got {self.kind!r}")
        if self.timestamp < 0:
            raise ValueError("timestamp must be non-negative")


@dataclass(frozen=True)
class KeyEventPair:
    question_index: QuestionIndex
    key: str
    code: str
    keydown_ts: int
    keyup_ts: int
    continuous: bool = True

    def __post_init__(self):
        if self.keyup_ts < self.keydown_ts:
            raise ValueError("keyup_ts must be >= keydown_ts")

    @property
    def hold_time(self):
        return self.keyup_ts - self.keydown_ts


@dataclass
class EventLog:
    """All paired events of one user/phase, ordered by keydown timestamp."""

    user_id: str
    phase: int
    pairs: list[KeyEventPair]


@dataclass
class PairingStats:
    matched: int = 0
    orphan_downs: int = 0
    orphan_ups: int = 0
    repeat_downs: int = 0


def _event_from_record(rec, line=None):
    missing = [c for c in CSV_COLUMNS if c not in rec or rec[c] in (None, "")]
    if missing:
        raise LogFormatError(f"missing fields: {', '.join(missing)}", line)
    try:
        qi = QuestionIndex.parse(rec["question_index"])
        return RawKeyEvent(
            user_id=str(rec["user_id"]),
            phase=int(rec["phase"]),
            question_index=qi,
            key=str(rec["key"]),
            code=str(rec["code"]),
            kind=str(rec["kind"]),
            timestamp=int(rec["timestamp_ms"]),
        )
    except (ValueError, TypeError) as exc:
        raise LogFormatError(str(exc), line) from None


def parse_log(source, format="csv"):
    """Parse a raw keystroke log into events, preserving input order.

    ``source`` may be a path, bytes, or a text/binary file object.
    ``format`` is ``"csv"`` (header required) or ``"jsonl"``.
    """
    text = _read_text(source)
    events = []
    if format == "csv":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None:
            return []
        unknown = [c for c in CSV_COLUMNS if c not in reader.fieldnames]
        if unknown:
            raise LogFormatError(f"header missing columns: {', '.join(unknown)}", line=1)
        for lineno, rec in enumerate(reader, start=2):
            events.append(_event_from_record(rec, lineno))
    elif format == "jsonl":
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LogFormatError(f"invalid JSON: {exc}", lineno) from None
            events.append(_event_from_record(rec, lineno))
    else:
        raise ValueError(f"unknown log format {format!r}")
    return events


def _read_text(source):
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data


def write_events(events, dest, format="csv"):
    """Serialize raw events back to the canonical schema."""
    rows = [
        {
            "user_id": e.user_id,
            "phase": e.phase,
            "question_index": str(e.question_index),
            "key": e.key,
            "code": e.code,
            "kind": e.kind,
            "timestamp_ms": e.timestamp,
        }
        for e in events
    ]
    own = isinstance(dest, str)
    fh = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        if format == "csv":
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)
        elif format == "jsonl":
            for row in rows:
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")
        else:
            raise ValueError(f"unknown log format {format!r}")
    finally:
        if own:
            fh.close()


def pair_events(events):
    """Match keydown events to their releases.

    Each ``down`` is matched to the earliest later ``up`` with the same
    ``code`` (first-in-first-matched, so key rollover across codes is
    preserved).  Auto-repeat ``down`` events (same code, release still
    pending) are discarded.  Unmatched events are dropped and counted.

    Returns ``(pairs, stats)`` with pairs ordered by keydown timestamp.
    """
    pending = defaultdict(list)  # code -> [RawKeyEvent down, ...] FIFO
    pairs = []
    stats = PairingStats()
    for ev in events:
        if ev.kind == "down":
            if pending[ev.code]:
                stats.repeat_downs += 1
                continue
            pending[ev.code].append(ev)
        else:
            if not pending[ev.code]:
                stats.orphan_ups += 1
                continue
            down = pending[ev.code].pop(0)
            if ev.timestamp < down.timestamp:
                # out-of-order log; treat as unmatched on both sides
                stats.orphan_downs += 1
                stats.orphan_ups += 1
                continue
            pairs.append(
                KeyEventPair(
                    question_index=down.question_index,
                    key=down.key,
                    code=down.code,
                    keydown_ts=down.timestamp,
                    keyup_ts=ev.timestamp,
                )
            )
            stats.matched += 1
    stats.orphan_downs += sum(len(v) for v in pending.values())
    pairs.sort(key=lambda p: p.keydown_ts)
    return pairs, stats


def flag_continuity(pairs):
    """Assign continuity flags over one user/phase's globally ordered pairs.

    A pair is non-continuous when it returns to a question that was already
    typed earlier while other questions' events intervened, i.e. it is the
    first pair of a revisit segment.  Forward moves into a question not seen
    before stay continuous, matching how revisit interruptions present in
    real logs.  Idempotent; depends only on the question_index sequence.
    """
    out = []
    seen = set()
    prev_qi = None
    for pair in pairs:
        qi = pair.question_index
        revisit = prev_qi is not None and qi != prev_qi and qi in seen
        out.append(replace(pair, continuous=not revisit))
        seen.add(qi)
        prev_qi = qi
    return out


def build_log(user_id, phase, events):
    """Pair, flag and wrap the events of one user/phase."""
    own = [e for e in events if e.user_id == user_id and e.phase == phase]
    pairs, stats = pair_events(own)
    return EventLog(user_id=user_id, phase=phase, pairs=flag_continuity(pairs)), stats
