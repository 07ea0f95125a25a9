"""Stratified cross-validation and per-classifier grid search.

Fold preprocessing is fitted inside each training fold only: SVM and MLP
standardize per fold, MLP additionally oversamples its minority class with
SMOTE, and the boosted trees take raw features (scale-invariant).
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from ..evaluation import balanced_accuracy
from .gbt import GradientBoostedTrees
from .mlp import MLPClassifier
from .smote import smote
from .standardize import Standardizer
from .svm import KernelSVM

log = logging.getLogger(__name__)

KINDS = ("svm", "mlp", "gbt")

DEFAULT_GRIDS = {
    "svm": {"C": [0.1, 1.0, 10.0], "gamma": ["auto", 0.01, 0.1]},
    "mlp": {"hidden": [32, 64], "lr": [0.01, 0.001]},
    "gbt": {"n_trees": [100, 300], "depth": [3, 5], "lr": [0.1]},
}


@dataclass
class GridSpec:
    grids: dict = field(default_factory=lambda: {k: dict(v) for k, v in DEFAULT_GRIDS.items()})
    cv_folds: int = 5
    seed: int = 0

    def cells(self, kind):
        grid = self.grids[kind]
        if not grid or any(not v for v in grid.values()):
            raise ValueError(f"empty hyperparameter grid for {kind}")
        names = sorted(grid)
        for combo in itertools.product(*(grid[n] for n in names)):
            yield dict(zip(names, combo))


def _complexity_key(kind, params):
    # ties in CV score resolve toward the simpler model
    if kind == "svm":
        gamma = params["gamma"]
        return (params["C"], 0.0 if gamma == "auto" else float(gamma))
    if kind == "mlp":
        return (params["hidden"], params["lr"])
    return (params["n_trees"], params["depth"], params.get("lr", 0.0))


def stratified_kfold(y, folds=5, seed=0):
    """Index splits preserving the class ratio within one sample per fold."""
    y = np.asarray(y).astype(int)
    rng = np.random.default_rng(seed)
    counts = [int(np.sum(y == cls)) for cls in np.unique(y)]
    smallest = min(counts)
    if smallest < folds:
        log.warning("class with %d members < %d folds; reducing folds", smallest, folds)
        folds = max(2, smallest)
    assignments = np.empty(len(y), dtype=int)
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        assignments[idx] = np.arange(len(idx)) % folds
    return [
        (np.flatnonzero(assignments != f), np.flatnonzero(assignments == f))
        for f in range(folds)
    ]


def make_model(kind, params, seed=0):
    if kind == "svm":
        return KernelSVM(C=params["C"], gamma=params["gamma"])
    if kind == "mlp":
        return MLPClassifier(
            hidden=params["hidden"],
            lr=params["lr"],
            epochs=params.get("epochs", 500),
            seed=seed,
        )
    if kind == "gbt":
        return GradientBoostedTrees(
            n_trees=params["n_trees"], depth=params["depth"], lr=params.get("lr", 0.1)
        )
    raise ValueError(f"unknown classifier kind {kind!r}")


def fit_with_preprocessing(kind, params, X, y, seed=0):
    """Fit one model with its kind-specific preprocessing; returns (model, standardizer)."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    standardizer = None
    if kind in ("svm", "mlp"):
        standardizer = Standardizer()
        X = standardizer.fit_transform(X)
    if kind == "mlp":
        pos, neg = int(y.sum()), int(len(y) - y.sum())
        minority = 1 if pos <= neg else 0
        target = max(pos, neg)
        synthetic = smote(X[y == minority], target_count=target, seed=seed)
        if len(synthetic):
            X = np.vstack([X, synthetic])
            y = np.concatenate([y, np.full(len(synthetic), minority)])
    model = make_model(kind, params, seed=seed).fit(X, y)
    return model, standardizer


def score_rows(kind, model, standardizer, X):
    """Genuine-oriented score: decision value (svm/gbt) or probability (mlp)."""
    X = np.asarray(X, dtype=float)
    if standardizer is not None:
        X = standardizer.transform(X)
    if kind == "mlp":
        return model.predict_proba(X)
    return model.decision_function(X)


def grid_search_cv(X, y, kind, spec: GridSpec, skip_cv_if_single=False):
    """Pick the best hyperparameter cell by mean stratified-CV balanced accuracy.

    Returns ``(best_params, best_score)``; the score is NaN when a
    single-cell grid is allowed to skip cross-validation.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    cells = sorted(spec.cells(kind), key=lambda p: _complexity_key(kind, p))
    if skip_cv_if_single and len(cells) == 1:
        return cells[0], float("nan")
    folds = stratified_kfold(y, spec.cv_folds, spec.seed)
    best_params, best_score = None, -np.inf
    for params in cells:
        accs = []
        for train_idx, test_idx in folds:
            try:
                model, std = fit_with_preprocessing(
                    kind, params, X[train_idx], y[train_idx], seed=spec.seed
                )
            except Exception as exc:  # e.g. diverged MLP cell
                log.warning("grid cell %r failed: %s", params, exc)
                accs = None
                break
            Xt = X[test_idx] if std is None else std.transform(X[test_idx])
            accs.append(balanced_accuracy(y[test_idx], model.predict(Xt)))
        if accs is None:
            continue
        score = float(np.mean(accs))
        if score > best_score:  # cells pre-sorted simple-first, so ties keep the simpler
            best_params, best_score = params, score
    if best_params is None:
        raise RuntimeError(f"every grid cell failed for {kind}")
    return best_params, best_score
