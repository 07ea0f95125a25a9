"""Synthetic multi-user keystroke logs with controllable timing signatures.

Each typist draws hold times and inter-key intervals from log-normal
distributions whose medians carry a per-user, per-key signature, scaled by
scenario and cognitive-load multipliers.  Question revisits can be injected
to reproduce the discontinuity pattern seen in real logs.  Output conforms
to the canonical ingest schema.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from .ingest import KeyEventPair, QuestionIndex, RawKeyEvent
from .windowing import DEFAULT_COGNITION_MAP

LETTER_CODES = tuple(f"Key{c}" for c in "ABCDEFGHIJKLMNOPQRSTUVWXYZ")
ALPHABET = LETTER_CODES + ("Space", "Backspace")

# shared key-frequency profile (Zipf-ish letters, frequent spaces) so the
# feature vocabulary overlaps across users while timings differ
_weights = np.concatenate([1.0 / np.arange(1, len(LETTER_CODES) + 1), [6.0, 0.8]])
KEY_WEIGHTS = _weights / _weights.sum()


def _key_for_code(code):
    if code == "Space":
        return " "
    if code == "Backspace":
        return "Backspace"
    return code[-1].lower()


def _hashed_normal(seed, *parts):
    """Deterministic standard normal keyed by arbitrary string parts."""
    token = ":".join(str(p) for p in (seed,) + parts)
    sub = np.random.default_rng(zlib.crc32(token.encode()))
    return sub.standard_normal()


@dataclass
class TypistProfile:
    user_id: str
    seed: int
    kht_median_ms: float = 80.0
    kht_sigma: float = 0.25  # within-user log-scale spread
    kit_median_ms: float = 200.0
    kit_sigma: float = 0.30
    code_spread: float = 0.25  # per-code signature strength (log scale)
    digraph_spread: float = 0.20
    scenario_multipliers: dict = field(default_factory=lambda: {1: 1.0, 2: 0.95, 3: 0.85})
    cognition_multipliers: dict = field(default_factory=lambda: {"low": 1.0, "high": 1.15})
    revisit_probability: float = 0.0
    phase2_drift: float = 0.03

    def kht_median(self, code):
        return self.kht_median_ms * np.exp(self.code_spread * _hashed_normal(self.seed, "kht", code))

    def kit_median(self, first, second, scenario, cognition):
        base = self.kit_median_ms * np.exp(
            self.digraph_spread * _hashed_normal(self.seed, "kit", first, second)
        )
        return base * self.scenario_multipliers[scenario] * self.cognition_multipliers[cognition]


def make_profiles(n, seed=0, base_spread=0.15, **overrides):
    """Population of distinct typists; ``base_spread`` controls between-user overlap."""
    rng = np.random.default_rng(seed)
    profiles = []
    for i in range(n):
        profiles.append(
            TypistProfile(
                user_id=f"user{i:02d}",
                seed=int(rng.integers(0, 2**31)),
                kht_median_ms=80.0 * float(np.exp(base_spread * rng.standard_normal())),
                kit_median_ms=200.0 * float(np.exp(base_spread * rng.standard_normal())),
                **overrides,
            )
        )
    return profiles


def _question_pairs(profile, phase, qi, cognition, n_keys, start_ts, rng):
    drift = 1.0 + profile.phase2_drift if phase == 2 else 1.0
    codes = rng.choice(len(ALPHABET), size=n_keys, p=KEY_WEIGHTS)
    pairs = []
    t = float(start_ts)
    prev = None
    for idx in codes:
        code = ALPHABET[idx]
        if prev is not None:
            median = profile.kit_median(prev, code, qi.scenario, cognition) * drift
            t += median * np.exp(profile.kit_sigma * rng.standard_normal())
        hold = profile.kht_median(code) * drift * np.exp(profile.kht_sigma * rng.standard_normal())
        pairs.append(
            KeyEventPair(
                question_index=qi,
                key=_key_for_code(code),
                code=code,
                keydown_ts=int(round(t)),
                keyup_ts=int(round(t + max(hold, 1.0))),
            )
        )
        prev = code
    return pairs, t


def inject_revisit(pairs, profile, phase, target_question, at_ts, n_keys=10, rng=None):
    """Append a burst attributed to an earlier question after later events.

    Reproduces the revisit discontinuity: grouping by question then shows a
    large gap that continuity-aware extraction must exclude.
    """
    rng = rng or np.random.default_rng(profile.seed)
    cognition = DEFAULT_COGNITION_MAP[target_question.question]
    burst, _ = _question_pairs(profile, phase, target_question, cognition, n_keys, at_ts, rng)
    return list(pairs) + burst


def generate_pairs(
    profile,
    phase,
    questions_per_scenario=6,
    keystrokes_per_question=300,
    cognition_map=None,
    start_ts=1_723_000_000_000,
):
    """All paired events of one user/phase, chronologically ordered, flags unset."""
    cognition_map = cognition_map or DEFAULT_COGNITION_MAP
    rng = np.random.default_rng((profile.seed * 1_000_003 + phase) % 2**32)
    pairs = []
    t = float(start_ts)
    for scenario in (1, 2, 3):
        done = []
        for question in range(1, questions_per_scenario + 1):
            qi = QuestionIndex(scenario, question)
            qpairs, t = _question_pairs(
                profile, phase, qi, cognition_map[question], keystrokes_per_question, t, rng
            )
            pairs.extend(qpairs)
            done.append(qi)
            t += float(rng.uniform(3000, 8000))  # pause between questions
            if len(done) > 1 and rng.uniform() < profile.revisit_probability:
                target = done[int(rng.integers(0, len(done) - 1))]
                t += float(rng.uniform(6000, 60000))
                burst = inject_revisit([], profile, phase, target, t, n_keys=12, rng=rng)
                pairs.extend(burst)
                t = max(p.keydown_ts for p in burst) + float(rng.uniform(3000, 8000))
        t += float(rng.uniform(10000, 30000))  # pause between scenarios
    return pairs


def _resolve_same_code_overlaps(pairs):
    """Truncate a hold that would still be down when the same key goes down again."""
    ordered = sorted(pairs, key=lambda p: p.keydown_ts)
    last_by_code = {}
    out = list(ordered)
    for i, p in enumerate(ordered):
        j = last_by_code.get(p.code)
        if j is not None and out[j].keyup_ts >= p.keydown_ts:
            prev = out[j]
            out[j] = KeyEventPair(
                prev.question_index,
                prev.key,
                prev.code,
                prev.keydown_ts,
                max(p.keydown_ts - 1, prev.keydown_ts),
                prev.continuous,
            )
        last_by_code[p.code] = i
    return out


def pairs_to_events(pairs, user_id, phase):
    """Explode pairs into down/up raw events in global timestamp order."""
    events = []
    for p in _resolve_same_code_overlaps(pairs):
        events.append(
            RawKeyEvent(user_id, phase, p.question_index, p.key, p.code, "down", p.keydown_ts)
        )
        events.append(
            RawKeyEvent(user_id, phase, p.question_index, p.key, p.code, "up", p.keyup_ts)
        )
    events.sort(key=lambda e: e.timestamp)
    return events


def generate(
    profiles,
    questions_per_scenario=6,
    keystrokes_per_question=300,
    phases=(1, 2),
    cognition_map=None,
):
    """Raw event streams for every profile/phase, keyed by (user_id, phase)."""
    out = {}
    for profile in profiles:
        for phase in phases:
            pairs = generate_pairs(
                profile, phase, questions_per_scenario, keystrokes_per_question, cognition_map
            )
            out[(profile.user_id, phase)] = pairs_to_events(pairs, profile.user_id, phase)
    return out


def table_fixture(user_id="user00", phase=1):
    """The revisit-discontinuity fixture: a 1.1 keystroke, work on 1.2, then a
    Backspace revisiting 1.1 whose naive within-question interval is 91,982 ms."""
    q11, q12 = QuestionIndex(1, 1), QuestionIndex(1, 2)
    rows = [
        (q11, "ㅁ", "KeyA", 1723028762335, 1723028762388),
        (q12, "ㅏ", "KeyK", 1723028763839, 1723028763840),
        (q12, "ㅅ", "KeyT", 1723028820100, 1723028820161),
        (q12, "ㅣ", "KeyL", 1723028820420, 1723028820488),
        (q12, "ㄹ", "KeyF", 1723028853990, 1723028854059),
        (q11, "Backspace", "Backspace", 1723028854317, 1723028854318),
    ]
    pairs = [KeyEventPair(qi, key, code, down, up) for qi, key, code, down, up in rows]
    return pairs_to_events(pairs, user_id, phase)
