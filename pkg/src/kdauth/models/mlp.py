"""Single-hidden-layer perceptron with logistic output and cross-entropy loss.

Trained by seeded mini-batch gradient descent; gradients are analytic and
exposed separately so they can be audited against finite differences.
"""

from __future__ import annotations

import numpy as np


class TrainingDiverged(RuntimeError):
    """Loss became non-finite during training."""


def init_params(n_in, n_hidden, rng):
    # symmetric zero init would never break hidden-unit symmetry
    return {
        "W1": rng.uniform(-1, 1, size=(n_in, n_hidden)) / np.sqrt(n_in),
        "b1": np.zeros(n_hidden),
        "W2": rng.uniform(-1, 1, size=n_hidden) / np.sqrt(n_hidden),
        "b2": 0.0,
    }


def forward(params, X):
    H = np.tanh(X @ params["W1"] + params["b1"])
    z = H @ params["W2"] + params["b2"]
    p = 1.0 / (1.0 + np.exp(-z))
    return H, z, p


def loss_and_grads(params, X, y, eps=1e-12):
    """Mean binary cross-entropy and its analytic parameter gradients."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    H, _, p = forward(params, X)
    loss = -float(np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps)))
    dz = (p - y) / n
    grads = {
        "W2": H.T @ dz,
        "b2": float(np.sum(dz)),
    }
    dH = np.outer(dz, params["W2"]) * (1.0 - H**2)
    grads["W1"] = X.T @ dH
    grads["b1"] = dH.sum(axis=0)
    return loss, grads


class MLPClassifier:
    def __init__(
        self,
        hidden=32,
        lr=0.01,
        epochs=500,
        batch_size=32,
        patience=20,
        min_improvement=1e-5,
        seed=0,
    ):
        self.hidden = hidden
        self.lr = lr
        self.epochs = epochs
        self.batch_size = batch_size
        self.patience = patience
        self.min_improvement = min_improvement
        self.seed = seed

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        rng = np.random.default_rng(self.seed)
        n = X.shape[0]
        params = init_params(X.shape[1], self.hidden, rng)
        best = np.inf
        stale = 0
        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                idx = order[start : start + self.batch_size]
                _, grads = loss_and_grads(params, X[idx], y[idx])
                for name, g in grads.items():
                    params[name] = params[name] - self.lr * g
            loss, _ = loss_and_grads(params, X, y)
            if not np.isfinite(loss):
                raise TrainingDiverged(f"non-finite loss {loss}")
            if loss < best - self.min_improvement:
                best = loss
                stale = 0
            else:
                stale += 1
                if stale >= self.patience:
                    break
        self.params_ = params
        return self

    def predict_proba(self, X):
        _, _, p = forward(self.params_, np.asarray(X, dtype=float))
        return p

    def predict(self, X):
        return (self.predict_proba(X) >= 0.5).astype(int)
