"""Sliding-window segmentation of paired keystroke events."""

from __future__ import annotations

from dataclasses import dataclass, field

from .ingest import EventLog, KeyEventPair

DEFAULT_LENGTH = 200
DEFAULT_OVERLAP = 150

SWEEP_LENGTHS = tuple(range(50, 401, 50))
SWEEP_FRACTIONS = (0.25, 0.50, 0.75)

#: question number -> cognitive-load level for the default six-question forms
DEFAULT_COGNITION_MAP = {1: "low", 2: "low", 3: "low", 4: "high", 5: "high", 6: "high"}


@dataclass(frozen=True)
class WindowConfig:
    length: int = DEFAULT_LENGTH
    overlap: int = DEFAULT_OVERLAP
    grouping: str = "by_question"  # by_question | by_scenario | by_all

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("window length must be positive")
        if not 0 <= self.overlap < self.length:
            raise ValueError("overlap must satisfy 0 <= overlap < length")
        if self.grouping not in ("by_question", "by_scenario", "by_all"):
            raise ValueError(f"unknown grouping {self.grouping!r}")

    @property
    def step(self):
        return self.length - self.overlap


@dataclass(frozen=True)
class Window:
    user_id: str
    phase: int
    scenario: int
    question: int
    cognition: str  # "low" | "high"
    ordinal: int
    pairs: tuple[KeyEventPair, ...] = field(repr=False)


def segment(log: EventLog, config: WindowConfig, cognition_map=None) -> list[Window]:
    """Cut one user/phase log into fixed-length overlapping windows.

    Pairs are grouped per ``config.grouping``, then windows of ``length``
    pairs start every ``step`` pairs; a trailing fragment shorter than the
    window length is discarded.  Windows never span grouping boundaries.
    """
    cognition_map = cognition_map or DEFAULT_COGNITION_MAP
    if config.grouping == "by_question":
        keyfunc = lambda p: (p.question_index.scenario, p.question_index.question)
    elif config.grouping == "by_scenario":
        keyfunc = lambda p: (p.question_index.scenario,)
    else:
        keyfunc = lambda p: ()

    groups: dict[tuple, list[KeyEventPair]] = {}
    for pair in log.pairs:
        groups.setdefault(keyfunc(pair), []).append(pair)

    windows = []
    for key in sorted(groups):
        pairs = sorted(groups[key], key=lambda p: p.keydown_ts)
        n, L, step = len(pairs), config.length, config.step
        for ordinal, start in enumerate(range(0, n - L + 1, step)):
            chunk = tuple(pairs[start : start + L])
            first = chunk[0].question_index
            windows.append(
                Window(
                    user_id=log.user_id,
                    phase=log.phase,
                    scenario=first.scenario,
                    question=first.question,
                    cognition=cognition_map[first.question],
                    ordinal=ordinal,
                    pairs=chunk,
                )
            )
    return windows


def sweep_grid(grouping="by_question"):
    """The 24 length/overlap configurations searched when tuning segmentation."""
    return [
        WindowConfig(length=L, overlap=round(L * frac), grouping=grouping)
        for L in SWEEP_LENGTHS
        for frac in SWEEP_FRACTIONS
    ]
