"""Keystroke-dynamics active-authentication toolkit."""

__version__ = "0.1.0"

from .ingest import EventLog, KeyEventPair, QuestionIndex, RawKeyEvent, build_log, parse_log
from .windowing import Window, WindowConfig, segment, sweep_grid

__all__ = [
    "EventLog",
    "KeyEventPair",
    "QuestionIndex",
    "RawKeyEvent",
    "build_log",
    "parse_log",
    "Window",
    "WindowConfig",
    "segment",
    "sweep_grid",
]
