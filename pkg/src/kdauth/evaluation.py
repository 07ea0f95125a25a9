"""Balanced accuracy, EER, DET curves and per-user aggregation.

Score orientation: higher means more genuine.  At a threshold t,
FAR = fraction of impostor scores >= t and FRR = fraction of genuine
scores < t.  EER is found by sweeping the midpoints of sorted unique
scores and linearly interpolating between the bracketing thresholds where
FAR - FRR changes sign; the interpolated value depends only on the
bracketing (FAR, FRR) pairs, so it is reproducible regardless of the
threshold spacing.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass
class ScoreSet:
    genuine: np.ndarray
    impostor: np.ndarray
    user_id: str | None = None

    def __post_init__(self):
        self.genuine = np.asarray(self.genuine, dtype=float)
        self.impostor = np.asarray(self.impostor, dtype=float)
        if self.genuine.size == 0 or self.impostor.size == 0:
            raise ValueError("both genuine and impostor score lists must be non-empty")
        if not (np.isfinite(self.genuine).all() and np.isfinite(self.impostor).all()):
            raise ValueError("scores must be finite")


@dataclass
class EERResult:
    eer: float
    threshold: float
    far_at_threshold: float
    frr_at_threshold: float


@dataclass
class DETCurve:
    thresholds: np.ndarray
    far: np.ndarray  # non-increasing in threshold
    frr: np.ndarray  # non-decreasing in threshold


def balanced_accuracy(y_true, y_pred):
    """(TPR + TNR) / 2; requires both classes in y_true."""
    y_true = np.asarray(y_true).astype(int)
    y_pred = np.asarray(y_pred).astype(int)
    pos = y_true == 1
    neg = y_true == 0
    if not pos.any() or not neg.any():
        raise ValueError("balanced accuracy requires both classes in y_true")
    tpr = float(np.mean(y_pred[pos] == 1))
    tnr = float(np.mean(y_pred[neg] == 0))
    return (tpr + tnr) / 2


def _candidate_thresholds(genuine, impostor):
    scores = np.unique(np.concatenate([genuine, impostor]))
    mids = (scores[:-1] + scores[1:]) / 2 if scores.size > 1 else np.empty(0)
    return np.concatenate([[scores[0] - 1.0], mids, [scores[-1] + 1.0]])


def _rates(genuine, impostor, thresholds):
    g = np.sort(genuine)
    i = np.sort(impostor)
    far = 1.0 - np.searchsorted(i, thresholds, side="left") / i.size
    frr = np.searchsorted(g, thresholds, side="left") / g.size
    return far, frr


def compute_eer(scores: ScoreSet) -> EERResult:
    """Equal error rate under the documented threshold-sweep convention."""
    thresholds = _candidate_thresholds(scores.genuine, scores.impostor)
    far, frr = _rates(scores.genuine, scores.impostor, thresholds)
    diff = far - frr  # non-increasing; starts at +1, ends at -1
    hi = int(np.argmax(diff <= 0))  # first non-positive
    lo = hi - 1
    if diff[hi] == 0:
        eer = float(far[hi])
        t = float(thresholds[hi])
        result = EERResult(eer, t, float(far[hi]), float(frr[hi]))
    else:
        s = diff[lo] / (diff[lo] - diff[hi])
        eer = float(far[lo] + s * (far[hi] - far[lo]))
        t = float(thresholds[lo] + s * (thresholds[hi] - thresholds[lo]))
        result = EERResult(eer, t, eer, eer)
    if result.eer > 0.5:
        warnings.warn(
            f"EER {result.eer:.3f} > 0.5: score orientation looks inverted", stacklevel=2
        )
    return result


def det_curve(scores: ScoreSet) -> DETCurve:
    """(FAR, FRR) at every candidate threshold, for DET plotting and pooling."""
    thresholds = _candidate_thresholds(scores.genuine, scores.impostor)
    far, frr = _rates(scores.genuine, scores.impostor, thresholds)
    return DETCurve(thresholds=thresholds, far=far, frr=frr)


@dataclass
class UserAggregate:
    mean: float
    std: float  # population
    per_user: list[tuple[str, float]]
    outliers: list[str]  # users above mean + 2*std


def aggregate_users(per_user_eers) -> UserAggregate:
    """Mean/std of per-user EERs plus a >2 sigma outlier flag."""
    items = list(per_user_eers)
    if not items:
        raise ValueError("need at least one user")
    values = np.array([v for _, v in items], dtype=float)
    mean = float(values.mean())
    std = float(values.std())
    outliers = [u for (u, v) in items if std > 0 and v > mean + 2 * std]
    return UserAggregate(mean=mean, std=std, per_user=items, outliers=outliers)
