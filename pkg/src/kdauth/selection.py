"""Minimum-redundancy maximum-relevance feature ranking with mutual information."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MISpec:
    bins: int = 10
    strategy: str = "quantile"  # quantile | uniform

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if self.strategy not in ("quantile", "uniform"):
            raise ValueError(f"unknown binning strategy {self.strategy!r}")


@dataclass
class SelectionResult:
    ranked: list[int]
    scores: list[float]  # greedy objective value at each step
    k_selected: int
    column_names: list[str] | None = None

    def to_json(self):
        names = self.column_names or [str(i) for i in self.ranked]
        return json.dumps(
            {
                "k_selected": self.k_selected,
                "ranked": [
                    {"column": int(c), "name": n, "score": s}
                    for c, n, s in zip(self.ranked, names, self.scores)
                ],
            },
            indent=2,
        )


def discretize(x, spec: MISpec):
    """Bin a continuous column into integer codes.

    Quantile binning places edges at equal-probability quantiles so each bin
    holds roughly the same mass; uniform binning uses equal-width edges.
    Constant columns map to a single code.
    """
    x = np.asarray(x, dtype=float)
    if x.min() == x.max():
        return np.zeros(x.shape, dtype=np.intp)
    if spec.strategy == "quantile":
        edges = np.quantile(x, np.linspace(0, 1, spec.bins + 1)[1:-1])
    else:
        edges = np.linspace(x.min(), x.max(), spec.bins + 1)[1:-1]
    return np.searchsorted(edges, x, side="right")


def _codes(values):
    _, codes = np.unique(np.asarray(values), return_inverse=True)
    return codes


def mutual_information_discrete(xc, yc):
    """MI in nats between two integer-coded columns via their joint histogram."""
    n = len(xc)
    nx, ny = int(xc.max()) + 1, int(yc.max()) + 1
    joint = np.zeros((nx, ny))
    np.add.at(joint, (xc, yc), 1.0)
    joint /= n
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    mask = joint > 0
    mi = float(np.sum(joint[mask] * np.log(joint[mask] / (px @ py)[mask])))
    return max(mi, 0.0)


def mutual_information(x, y, spec=MISpec(), x_discrete=False, y_discrete=True):
    """MI between a feature column and labels (or another column), in nats.

    Continuous inputs are discretized per ``spec``; categorical inputs keep
    their categories.  Always non-negative; zero for constant columns.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if len(x) != len(y) or len(x) == 0:
        raise ValueError("x and y must be equal-length and non-empty")
    xc = _codes(x) if x_discrete else discretize(x, spec)
    yc = _codes(y) if y_discrete else discretize(y, spec)
    return mutual_information_discrete(xc.astype(np.intp), yc.astype(np.intp))


def mrmr_rank(X, labels, k, spec=MISpec(), column_names=None):
    """Greedy forward MRMR ranking (difference form).

    Step 1 takes the column with maximal relevance MI(f, label); each later
    step takes argmax of relevance minus the mean MI to already-selected
    columns.  Ties break to the lower column index.
    """
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    n, d = X.shape
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > d:
        log.warning("k=%d exceeds %d columns; truncating", k, d)
        k = d

    codes = np.stack([discretize(X[:, j], spec) for j in range(d)])
    ycodes = _codes(labels)
    relevance = np.array(
        [mutual_information_discrete(codes[j], ycodes) for j in range(d)]
    )

    selected: list[int] = []
    scores: list[float] = []
    redundancy_sum = np.zeros(d)
    remaining = np.ones(d, dtype=bool)
    for step in range(k):
        if step == 0:
            objective = relevance.copy()
        else:
            objective = relevance - redundancy_sum / len(selected)
        objective[~remaining] = -np.inf
        best = int(np.argmax(objective))  # argmax takes the first (lowest) index on ties
        selected.append(best)
        scores.append(float(objective[best]))
        remaining[best] = False
        for j in np.flatnonzero(remaining):
            redundancy_sum[j] += mutual_information_discrete(codes[j], codes[best])

    names = [column_names[j] for j in selected] if column_names else None
    return SelectionResult(ranked=selected, scores=scores, k_selected=k, column_names=names)
