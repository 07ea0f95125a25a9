"""Gradient-boosted regression trees on logistic loss with second-order leaf weights.

Each round fits a depth-limited tree to the current gradients g_i and
hessians h_i of the weighted logistic loss; leaves take weight
-G / (H + lambda) and splits maximize the usual second-order gain.  Class
imbalance is handled by weighting positive samples by #neg / #pos.
Splits depend only on feature value order, so predictions are invariant
under strictly monotone per-feature transforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class TreeNode:
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    weight: float = 0.0

    @property
    def is_leaf(self):
        return self.left is None


def leaf_weight(g_sum, h_sum, reg_lambda):
    return -g_sum / (h_sum + reg_lambda)


def split_gain(gl, hl, gr, hr, reg_lambda):
    def score(g, h):
        return g * g / (h + reg_lambda)

    return 0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr))


def _best_split(Xcol, g, h, reg_lambda):
    order = np.argsort(Xcol, kind="stable")
    xs = Xcol[order]
    gl = np.cumsum(g[order])[:-1]
    hl = np.cumsum(h[order])[:-1]
    G, H = gl[-1] + g[order][-1], hl[-1] + h[order][-1]
    valid = xs[:-1] < xs[1:]
    if not valid.any():
        return None
    gains = split_gain(gl, hl, G - gl, H - hl, reg_lambda)
    gains[~valid] = -np.inf
    k = int(np.argmax(gains))
    if gains[k] <= 0:
        return None
    return gains[k], (xs[k] + xs[k + 1]) / 2.0


def _build_tree(X, g, h, depth, reg_lambda):
    node = TreeNode(weight=leaf_weight(g.sum(), h.sum(), reg_lambda))
    if depth == 0 or len(g) < 2:
        return node
    best = None
    for f in range(X.shape[1]):
        found = _best_split(X[:, f], g, h, reg_lambda)
        if found and (best is None or found[0] > best[0]):
            best = (found[0], f, found[1])
    if best is None:  # no split with positive gain
        return node
    _, f, threshold = best
    mask = X[:, f] < threshold
    node.feature = f
    node.threshold = threshold
    node.left = _build_tree(X[mask], g[mask], h[mask], depth - 1, reg_lambda)
    node.right = _build_tree(X[~mask], g[~mask], h[~mask], depth - 1, reg_lambda)
    return node


def _tree_predict(node, X):
    out = np.empty(X.shape[0])
    stack = [(node, np.arange(X.shape[0]))]
    while stack:
        nd, idx = stack.pop()
        if nd.is_leaf:
            out[idx] = nd.weight
            continue
        mask = X[idx, nd.feature] < nd.threshold
        stack.append((nd.left, idx[mask]))
        stack.append((nd.right, idx[~mask]))
    return out


class GradientBoostedTrees:
    def __init__(self, n_trees=100, depth=3, lr=0.1, reg_lambda=1.0, scale_pos_weight="auto"):
        self.n_trees = n_trees
        self.depth = depth
        self.lr = lr
        self.reg_lambda = reg_lambda
        self.scale_pos_weight = scale_pos_weight

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.scale_pos_weight == "auto":
            pos = y.sum()
            spw = (len(y) - pos) / pos if pos else 1.0
        else:
            spw = float(self.scale_pos_weight)
        w = np.where(y == 1, spw, 1.0)
        F = np.zeros(len(y))
        self.trees_ = []
        for _ in range(self.n_trees):
            p = 1.0 / (1.0 + np.exp(-F))
            g = (p - y) * w
            h = np.maximum(p * (1.0 - p), 1e-16) * w
            tree = _build_tree(X, g, h, self.depth, self.reg_lambda)
            self.trees_.append(tree)
            F += self.lr * _tree_predict(tree, X)
        return self

    def decision_function(self, X):
        """Summed margin (log-odds scale)."""
        X = np.asarray(X, dtype=float)
        F = np.zeros(X.shape[0])
        for tree in self.trees_:
            F += self.lr * _tree_predict(tree, X)
        return F

    def predict(self, X):
        return (self.decision_function(X) >= 0).astype(int)
