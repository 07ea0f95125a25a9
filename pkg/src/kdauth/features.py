"""KHT/KIT sample extraction, feature vocabulary and matrix assembly.

KHT (key hold time) is keyup minus keydown per key press.  KIT (key
interval time) is the latency between consecutive keydown events, recorded
per ordered physical-key digraph; intervals that cross a non-continuous
boundary (a question revisit) or exceed an upper threshold are excluded.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from .windowing import Window

log = logging.getLogger(__name__)

DEFAULT_KIT_MAX_MS = 5000.0
STAT_NAMES = ("q1", "median", "q3", "mean", "std")
MIN_VALUES_PER_WINDOW = 4
MIN_WINDOW_FRACTION = 0.6


class EmptyVocabularyError(RuntimeError):
    """No feature passed the commonality filter; window too small or thresholds too strict."""


@dataclass(frozen=True, order=True)
class FeatureKey:
    kind: str  # "KHT" | "KIT"
    first_code: str
    second_code: str = ""  # empty for KHT

    def __post_init__(self):
        if self.kind not in ("KHT", "KIT"):
            raise ValueError(f"kind must be KHT or KIT, got {self.kind!r}")
        if self.kind == "KHT" and self.second_code:
            raise ValueError("KHT features take a single code")
        if self.kind == "KIT" and not self.second_code:
            raise ValueError("KIT features take an ordered code pair")

    @property
    def name(self):
        if self.kind == "KHT":
            return f"KHT:{self.first_code}"
        return f"KIT:{self.first_code}>{self.second_code}"

    @classmethod
    def from_name(cls, name):
        kind, _, rest = name.partition(":")
        if kind == "KHT":
            return cls("KHT", rest)
        first, _, second = rest.partition(">")
        return cls("KIT", first, second)


def extract_kht(window: Window) -> dict[FeatureKey, list[float]]:
    """Hold-time samples per code; unaffected by continuity flags."""
    samples: dict[FeatureKey, list[float]] = {}
    for pair in window.pairs:
        samples.setdefault(FeatureKey("KHT", pair.code), []).append(float(pair.hold_time))
    return samples


def extract_kit(window: Window, max_interval_ms=DEFAULT_KIT_MAX_MS) -> dict[FeatureKey, list[float]]:
    """Continuity-aware keydown-to-keydown intervals per ordered digraph.

    The interval into a non-continuous pair is dropped; measurement resumes
    from that pair to the next keydown.  Intervals above ``max_interval_ms``
    are also dropped.
    """
    samples: dict[FeatureKey, list[float]] = {}
    pairs = window.pairs
    for left, right in zip(pairs, pairs[1:]):
        if not right.continuous:
            continue
        dt = float(right.keydown_ts - left.keydown_ts)
        if dt > max_interval_ms:
            continue
        samples.setdefault(FeatureKey("KIT", left.code, right.code), []).append(dt)
    return samples


def extract_window_samples(window, max_interval_ms=DEFAULT_KIT_MAX_MS):
    samples = extract_kht(window)
    samples.update(extract_kit(window, max_interval_ms))
    return samples


def naive_kit(window: Window) -> dict[FeatureKey, list[float]]:
    """Consecutive keydown differences ignoring continuity; diagnostic only."""
    samples: dict[FeatureKey, list[float]] = {}
    for left, right in zip(window.pairs, window.pairs[1:]):
        dt = float(right.keydown_ts - left.keydown_ts)
        samples.setdefault(FeatureKey("KIT", left.code, right.code), []).append(dt)
    return samples


@dataclass(frozen=True)
class FeatureVocabulary:
    entries: tuple[FeatureKey, ...]
    min_values_per_window: int = MIN_VALUES_PER_WINDOW
    min_window_fraction: float = MIN_WINDOW_FRACTION

    def __len__(self):
        return len(self.entries)

    def column_names(self):
        return [f"{key.name}:{stat}" for key in self.entries for stat in STAT_NAMES]


def build_vocabulary(
    window_samples,
    min_values_per_window=MIN_VALUES_PER_WINDOW,
    min_window_fraction=MIN_WINDOW_FRACTION,
):
    """Select features common across the pooled training windows of all users.

    A feature qualifies in a window when it has at least
    ``min_values_per_window`` samples there, and enters the vocabulary when
    it qualifies in at least ``min_window_fraction`` of all windows pooled
    across users.  Entries come back in deterministic lexicographic order.
    """
    window_samples = list(window_samples)
    if not window_samples:
        raise EmptyVocabularyError("no training windows")
    counts: dict[FeatureKey, int] = {}
    for samples in window_samples:
        for key, values in samples.items():
            if len(values) >= min_values_per_window:
                counts[key] = counts.get(key, 0) + 1
    threshold = min_window_fraction * len(window_samples)
    entries = tuple(sorted(k for k, c in counts.items() if c >= threshold))
    if not entries:
        raise EmptyVocabularyError(
            f"no feature qualified in >= {min_window_fraction:.0%} of "
            f"{len(window_samples)} windows"
        )
    return FeatureVocabulary(entries, min_values_per_window, min_window_fraction)


def summarize(values, lower=0.1, upper=0.9):
    """Winsorize one window's sample set and compute its five statistics.

    Values are clipped to the sample set's [P10, P90] (linear-interpolation
    quantiles), then q1, median, q3, mean and population std are taken.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValueError("summarize requires at least one sample")
    lo, hi = np.quantile(arr, [lower, upper])
    clipped = np.clip(arr, lo, hi)
    q1, median, q3 = np.quantile(clipped, [0.25, 0.5, 0.75])
    return float(q1), float(median), float(q3), float(clipped.mean()), float(clipped.std())


@dataclass
class RowMeta:
    user_id: str
    phase: int
    scenario: int
    question: int
    cognition: str


@dataclass
class FeatureMatrix:
    columns: list[str]
    values: np.ndarray  # rows x columns, float, no NaN after imputation
    meta: list[RowMeta]
    labels: np.ndarray | None = None  # 1=genuine, 0=impostor, per row

    @property
    def n_rows(self):
        return self.values.shape[0]

    def to_csv(self, dest):
        own = isinstance(dest, str)
        fh = open(dest, "w", newline="") if own else dest
        try:
            writer = csv.writer(fh)
            writer.writerow(["user_id", "phase", "scenario", "question", "cognition"] + self.columns)
            for meta, row in zip(self.meta, self.values):
                writer.writerow(
                    [meta.user_id, meta.phase, meta.scenario, meta.question, meta.cognition]
                    + [repr(v) for v in row]
                )
        finally:
            if own:
                fh.close()


@dataclass
class ImputationModel:
    """Training-derived column means used to fill missing cells everywhere."""

    columns: list[str]
    means: np.ndarray


def _raw_cells(windows, vocab, max_interval_ms=DEFAULT_KIT_MAX_MS):
    index = {key: i for i, key in enumerate(vocab.entries)}
    n_stats = len(STAT_NAMES)
    values = np.full((len(windows), len(vocab.entries) * n_stats), np.nan)
    meta = []
    for r, window in enumerate(windows):
        samples = extract_window_samples(window, max_interval_ms)
        for key, vals in samples.items():
            c = index.get(key)
            if c is None or len(vals) < vocab.min_values_per_window:
                continue
            values[r, c * n_stats : (c + 1) * n_stats] = summarize(vals)
        meta.append(
            RowMeta(window.user_id, window.phase, window.scenario, window.question, window.cognition)
        )
    return values, meta


def fit_matrix(train_windows, vocab, max_interval_ms=DEFAULT_KIT_MAX_MS):
    """Build the training feature matrix and its imputation model.

    Columns with no observed training value are dropped with a warning;
    remaining missing cells are filled with training column means.
    """
    values, meta = _raw_cells(train_windows, vocab, max_interval_ms)
    columns = vocab.column_names()
    observed = ~np.all(np.isnan(values), axis=0)
    if not observed.all():
        dropped = [c for c, keep in zip(columns, observed) if not keep]
        log.warning("dropping %d all-missing training columns: %s", len(dropped), dropped[:5])
        values = values[:, observed]
        columns = [c for c, keep in zip(columns, observed) if keep]
    means = np.nanmean(values, axis=0)
    values = np.where(np.isnan(values), means, values)
    matrix = FeatureMatrix(columns=columns, values=values, meta=meta)
    return matrix, ImputationModel(columns=columns, means=means)

def apply_matrix(windows, vocab, imputation, max_interval_ms=DEFAULT_KIT_MAX_MS):
    """Build a matrix for held-out windows using training imputation means."""
    values, meta = _raw_cells(windows, vocab, max_interval_ms)
    all_columns = vocab.column_names()
    keep = [i for i, c in enumerate(all_columns) if c in set(imputation.columns)]
    values = values[:, keep]
    values = np.where(np.isnan(values), imputation.means, values)
    return FeatureMatrix(columns=list(imputation.columns), values=values, meta=meta)
