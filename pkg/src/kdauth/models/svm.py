"""Soft-margin RBF-kernel SVM trained by sequential minimal optimization.

Solves the dual

    min  1/2 a' Q a - e' a    s.t.  0 <= a_i <= C_i,  y' a = 0

with Q_ij = y_i y_j K(x_i, x_j), using maximal-violating-pair working-set
selection on the maintained gradient.  Per-class box bounds C_i implement
class weighting inversely proportional to class frequency.
"""

from __future__ import annotations

import logging

import numpy as np

log = logging.getLogger(__name__)


def rbf_kernel(A, B, gamma):
    a2 = np.sum(A * A, axis=1)[:, None]
    b2 = np.sum(B * B, axis=1)[None, :]
    d2 = np.maximum(a2 + b2 - 2.0 * A @ B.T, 0.0)
    return np.exp(-gamma * d2)


class KernelSVM:
    def __init__(self, C=1.0, gamma="auto", tol=1e-3, max_iter=None, class_weight="balanced"):
        self.C = C
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter
        self.class_weight = class_weight
        self.converged_ = None

    def _gamma_value(self, d):
        return 1.0 / d if self.gamma == "auto" else float(self.gamma)

    def _box(self, y):
        n = len(y)
        if self.class_weight is None:
            return np.full(n, self.C)
        counts = {+1: int(np.sum(y > 0)), -1: int(np.sum(y < 0))}
        weights = {cls: n / (2.0 * cnt) for cls, cnt in counts.items()}
        return np.array([self.C * weights[int(v)] for v in y])

    def fit(self, X, y):
        """y in {0,1} or {-1,+1}; both classes must be present."""
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        y = np.where(y > 0, 1.0, -1.0)
        if not ((y > 0).any() and (y < 0).any()):
            raise ValueError("need both classes to train an SVM")
        n = X.shape[0]
        gamma = self._gamma_value(X.shape[1])
        Cbox = self._box(y)
        K = rbf_kernel(X, X, gamma)

        alpha = np.zeros(n)
        G = -np.ones(n)  # gradient of the dual objective
        max_iter = self.max_iter or max(10_000, 100 * n)
        self.converged_ = False
        for _ in range(max_iter):
            neg_yG = -y * G
            up = ((y > 0) & (alpha < Cbox)) | ((y < 0) & (alpha > 0))
            low = ((y < 0) & (alpha < Cbox)) | ((y > 0) & (alpha > 0))
            i = int(np.flatnonzero(up)[np.argmax(neg_yG[up])])
            j = int(np.flatnonzero(low)[np.argmin(neg_yG[low])])
            m, M = neg_yG[i], neg_yG[j]
            if m - M <= self.tol:
                self.converged_ = True
                break
            quad = max(K[i, i] + K[j, j] - 2.0 * K[i, j], 1e-12)
            t = (m - M) / quad
            t = min(t, Cbox[i] - alpha[i] if y[i] > 0 else alpha[i])
            t = min(t, alpha[j] if y[j] > 0 else Cbox[j] - alpha[j])
            alpha[i] += y[i] * t
            alpha[j] -= y[j] * t
            G += t * y * (K[:, i] - K[:, j])
        if not self.converged_:
            log.warning("SMO hit the iteration cap (%d); returning best iterate", max_iter)

        # y_i - u_i equals -y_i G_i, so free support vectors pin the bias
        neg_yG = -y * G
        free = (alpha > 1e-12) & (alpha < Cbox - 1e-12)
        if free.any():
            b = float(np.mean(neg_yG[free]))
        else:
            up = ((y > 0) & (alpha < Cbox)) | ((y < 0) & (alpha > 0))
            low = ((y < 0) & (alpha < Cbox)) | ((y > 0) & (alpha > 0))
            b = float((np.max(neg_yG[up]) + np.min(neg_yG[low])) / 2)

        sv = alpha > 1e-12
        self.alpha_ = alpha
        self.box_ = Cbox
        self.y_ = y
        self.bias_ = b
        self.gamma_ = gamma
        self.sv_X_ = X[sv]
        self.sv_coef_ = (alpha * y)[sv]
        return self

    def decision_function(self, X):
        X = np.asarray(X, dtype=float)
        K = rbf_kernel(X, self.sv_X_, self.gamma_)
        return K @ self.sv_coef_ + self.bias_

    def predict(self, X):
        return (self.decision_function(X) >= 0).astype(int)
