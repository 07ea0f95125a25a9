"""Directory-backed event store: one canonical CSV per user/phase."""

from __future__ import annotations

import logging
import os
import re

from .ingest import EventLog, LogFormatError, build_log, parse_log, write_events

log = logging.getLogger(__name__)

_FILENAME = re.compile(r"^(?P<user>.+)_p(?P<phase>\d+)\.csv$")


def event_path(store_dir, user_id, phase):
    return os.path.join(store_dir, f"{user_id}_p{phase}.csv")


def save_store(streams, store_dir):
    """Persist raw events keyed by (user_id, phase) as canonical CSVs."""
    os.makedirs(store_dir, exist_ok=True)
    for (user, phase), events in sorted(streams.items()):
        write_events(events, event_path(store_dir, user, phase))


def load_store(store_dir):
    """Read every user/phase log back into paired, continuity-flagged EventLogs."""
    logs: dict[tuple[str, int], EventLog] = {}
    stats: dict[tuple[str, int], object] = {}
    for name in sorted(os.listdir(store_dir)):
        m = _FILENAME.match(name)
        if not m:
            continue
        user, phase = m.group("user"), int(m.group("phase"))
        events = parse_log(os.path.join(store_dir, name))
        logs[(user, phase)], stats[(user, phase)] = build_log(user, phase, events)
    return logs, stats


def ingest_files(paths, store_dir, format="csv"):
    """Validate raw logs and persist them grouped by (user_id, phase).

    Returns ``(n_events, errors)``; files with schema violations are
    skipped and reported, valid files are merged into the store.
    """
    streams: dict[tuple[str, int], list] = {}
    errors = []
    n_events = 0
    for path in paths:
        try:
            events = parse_log(path, format=format)
        except LogFormatError as exc:
            errors.append((path, str(exc)))
            continue
        for ev in events:
            streams.setdefault((ev.user_id, ev.phase), []).append(ev)
        n_events += len(events)
    for key in streams:
        streams[key].sort(key=lambda e: e.timestamp)
    save_store(streams, store_dir)
    return n_events, errors
