"""Local HTTP scoring service around a frozen verifier bundle.

The service never trains: it accepts raw key events per session, pairs
them on the fly, and scores the most recent full window under the
bundle's window configuration.  Wire events use the same field names as
the JSON-lines ingest schema plus a ``session_id``.
"""

from __future__ import annotations

import threading
from typing import Literal

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel

from .ingest import QuestionIndex, RawKeyEvent, flag_continuity, pair_events
from .windowing import DEFAULT_COGNITION_MAP, Window


class WireEvent(BaseModel):
    session_id: str
    user_id: str
    phase: int = 1
    question_index: str
    key: str
    code: str
    kind: Literal["down", "up"]
    timestamp_ms: int


class _Session:
    def __init__(self):
        self.events: list[RawKeyEvent] = []
        self.lock = threading.Lock()

    def append(self, events):
        with self.lock:
            self.events.extend(events)
            return len(self.events)

    def snapshot(self):
        with self.lock:
            return list(self.events)


def _to_raw(ev: WireEvent) -> RawKeyEvent:
    try:
        qi = QuestionIndex.parse(ev.question_index)
        return RawKeyEvent(
            user_id=ev.user_id,
            phase=ev.phase,
            question_index=qi,
            key=ev.key,
            code=ev.code,
            kind=ev.kind,
            timestamp=ev.timestamp_ms,
        )
    except ValueError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from None


def create_app(bundle) -> FastAPI:
    app = FastAPI(title="keystroke verifier", version="1")
    sessions: dict[str, _Session] = {}
    registry_lock = threading.Lock()
    L = bundle.window.length

    def get_session(session_id) -> _Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    def latest_window(session: _Session):
        """(window, n_pairs): the most recent L paired events, or None while warming up."""
        pairs, _stats = pair_events(session.snapshot())
        if len(pairs) < L:
            return None, len(pairs)
        tail = flag_continuity(pairs)[-L:]
        last = tail[-1].question_index
        return (
            Window(
                user_id=bundle.user_id,
                phase=0,
                scenario=last.scenario,
                question=last.question,
                cognition=DEFAULT_COGNITION_MAP[last.question],
                ordinal=0,
                pairs=tuple(tail),
            ),
            len(pairs),
        )

    @app.post("/events")
    def post_events(events: list[WireEvent]):
        raw_by_session: dict[str, list[RawKeyEvent]] = {}
        for ev in events:
            raw_by_session.setdefault(ev.session_id, []).append(_to_raw(ev))
        totals = {}
        for session_id, raw in raw_by_session.items():
            with registry_lock:
                session = sessions.setdefault(session_id, _Session())
            totals[session_id] = session.append(raw)
        return {"accepted": len(events), "sessions": totals}

    def score_payload(session_id):
        window, n_pairs = latest_window(get_session(session_id))
        if window is None:
            return {
                "session_id": session_id,
                "status": "warming_up",
                "pairs": n_pairs,
                "pairs_remaining": L - n_pairs,
                "window_length": L,
            }
        score = float(bundle.score_windows([window])[0])
        return {
            "session_id": session_id,
            "status": "ok",
            "score": score,
            "pairs": n_pairs,
            "window_length": L,
            "bundled_threshold": bundle.threshold,
        }

    @app.get("/score")
    def get_score(session: str = Query(...)):
        return score_payload(session)

    @app.get("/decision")
    def get_decision(session: str = Query(...), threshold: float | None = Query(None)):
        payload = score_payload(session)
        if payload["status"] != "ok":
            return payload
        t = bundle.threshold if threshold is None else threshold
        payload["threshold"] = t
        payload["decision"] = "ACCEPT" if payload["score"] >= t else "REJECT"
        return payload

    return app
