"""SMOTE minority oversampling by interpolation between nearest neighbors."""

from __future__ import annotations

import warnings

import numpy as np


def smote(minority, target_count, k_neighbors=5, seed=0):
    """Synthesize minority rows until the class reaches ``target_count``.

    Each synthetic row is x_i + u * (x_nn - x_i) with u ~ Uniform(0, 1) and
    x_nn one of the k nearest minority neighbors of x_i (Euclidean).
    Returns only the synthetic rows.  A single-row minority class is
    duplicated with a warning, since interpolation is undefined there.
    """
    X = np.asarray(minority, dtype=float)
    n = X.shape[0]
    if n == 0:
        raise ValueError("minority class is empty")
    n_new = max(0, int(target_count) - n)
    if n_new == 0:
        return np.empty((0, X.shape[1]))
    rng = np.random.default_rng(seed)
    if n == 1:
        warnings.warn("SMOTE with a single minority row duplicates it", stacklevel=2)
        return np.repeat(X, n_new, axis=0)

    k = min(k_neighbors, n - 1)
    d2 = np.sum((X[:, None, :] - X[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    neighbors = np.argsort(d2, axis=1)[:, :k]

    base = rng.integers(0, n, size=n_new)
    pick = rng.integers(0, k, size=n_new)
    u = rng.uniform(0.0, 1.0, size=(n_new, 1))
    nn = neighbors[base, pick]
    return X[base] + u * (X[nn] - X[base])
