"""Per-user verifier: selected features + standardizer + fitted classifier."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gridsearch import GridSpec, fit_with_preprocessing, grid_search_cv, score_rows


@dataclass
class VerifierModel:
    kind: str
    model: object
    standardizer: object | None
    selected_features: list[int]  # column indices into the cell's feature matrix
    params: dict
    cv_score: float
    threshold: float | None = None  # genuine iff score >= threshold

    def score(self, X):
        """Genuine-oriented scores for rows already restricted to selected columns."""
        return score_rows(self.kind, self.model, self.standardizer, X)

    def score_full(self, X_full):
        X_full = np.asarray(X_full, dtype=float)
        return self.score(X_full[:, self.selected_features])


def train_verifier(X, y, kind, spec: GridSpec, selected_features=None, skip_cv_if_single=False):
    """Grid-search then refit on the full training matrix.

    ``X`` must already be restricted to ``selected_features`` columns if
    given (they are recorded, not applied here).
    """
    best_params, cv_score = grid_search_cv(X, y, kind, spec, skip_cv_if_single)
    model, standardizer = fit_with_preprocessing(kind, best_params, X, y, seed=spec.seed)
    if selected_features is None:
        selected_features = list(range(np.asarray(X).shape[1]))
    return VerifierModel(
        kind=kind,
        model=model,
        standardizer=standardizer,
        selected_features=list(selected_features),
        params=best_params,
        cv_score=cv_score,
    )
