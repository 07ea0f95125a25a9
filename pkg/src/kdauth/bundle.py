"""Versioned on-disk container for a trained per-user verifier.

Layout: 4-byte magic, 1-byte format version, 8-byte big-endian payload
length, zlib-compressed JSON payload, 4-byte CRC32 of the compressed
payload.  The payload carries everything scoring needs: model state,
standardizer, selected columns, feature vocabulary, imputation means and
the window configuration — so a server can score raw events without the
training data.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass

import numpy as np

from .evaluation import ScoreSet, compute_eer
from .features import (
    FeatureKey,
    FeatureVocabulary,
    ImputationModel,
    apply_matrix,
    build_vocabulary,
    extract_window_samples,
    fit_matrix,
)
from .models import GradientBoostedTrees, KernelSVM, MLPClassifier, Standardizer, VerifierModel
from .models.gbt import TreeNode
from .models.gridsearch import GridSpec
from .models.verifier import train_verifier
from .selection import mrmr_rank
from .windowing import WindowConfig, segment

MAGIC = b"KDAB"
FORMAT_VERSION = 1


class BundleFormatError(ValueError):
    """File is not a verifier bundle or is corrupt/unsupported."""


@dataclass
class VerifierBundle:
    user_id: str
    verifier: VerifierModel
    vocabulary: FeatureVocabulary
    imputation: ImputationModel
    window: WindowConfig
    kit_max_ms: float = 5000.0

    @property
    def threshold(self):
        return self.verifier.threshold

    def score_windows(self, windows):
        """Genuine-oriented score per window, via the stored pipeline."""
        matrix = apply_matrix(windows, self.vocabulary, self.imputation, self.kit_max_ms)
        return self.verifier.score_full(matrix.values)


def _flatten_tree(root):
    nodes = []

    def walk(node):
        idx = len(nodes)
        nodes.append(
            {
                "feature": node.feature,
                "threshold": node.threshold,
                "weight": node.weight,
                "left": -1,
                "right": -1,
            }
        )
        if not node.is_leaf:
            nodes[idx]["left"] = walk(node.left)
            nodes[idx]["right"] = walk(node.right)
        return idx

    walk(root)
    return nodes


def _unflatten_tree(nodes):
    built = [TreeNode(n["feature"], n["threshold"], None, None, n["weight"]) for n in nodes]
    for node, raw in zip(built, nodes):
        if raw["left"] >= 0:
            node.left = built[raw["left"]]
            node.right = built[raw["right"]]
    return built[0]


def _model_state(kind, model):
    if kind == "svm":
        return {
            "sv_X": model.sv_X_.tolist(),
            "sv_coef": model.sv_coef_.tolist(),
            "bias": model.bias_,
            "gamma": model.gamma_,
        }
    if kind == "mlp":
        p = model.params_
        return {
            "W1": p["W1"].tolist(),
            "b1": p["b1"].tolist(),
            "W2": p["W2"].tolist(),
            "b2": p["b2"],
        }
    if kind == "gbt":
        return {"lr": model.lr, "trees": [_flatten_tree(t) for t in model.trees_]}
    raise ValueError(f"unknown classifier kind {kind!r}")


def _restore_model(kind, state):
    if kind == "svm":
        model = KernelSVM()
        model.sv_X_ = np.asarray(state["sv_X"], dtype=float)
        model.sv_coef_ = np.asarray(state["sv_coef"], dtype=float)
        model.bias_ = float(state["bias"])
        model.gamma_ = float(state["gamma"])
        return model
    if kind == "mlp":
        model = MLPClassifier()
        model.params_ = {
            "W1": np.asarray(state["W1"], dtype=float),
            "b1": np.asarray(state["b1"], dtype=float),
            "W2": np.asarray(state["W2"], dtype=float),
            "b2": float(state["b2"]),
        }
        return model
    if kind == "gbt":
        model = GradientBoostedTrees(lr=float(state["lr"]))
        model.trees_ = [_unflatten_tree(t) for t in state["trees"]]
        return model
    raise BundleFormatError(f"unknown classifier kind {kind!r}")


def _payload(bundle: VerifierBundle):
    verifier = bundle.verifier
    std = verifier.standardizer
    return {
        "user_id": bundle.user_id,
        "kind": verifier.kind,
        "params": verifier.params,
        "cv_score": verifier.cv_score,
        "threshold": verifier.threshold,
        "selected_features": list(map(int, verifier.selected_features)),
        "standardizer": (
            None if std is None else {"mean": std.mean_.tolist(), "std": std.std_.tolist()}
        ),
        "model": _model_state(verifier.kind, verifier.model),
        "vocabulary": {
            "entries": [k.name for k in bundle.vocabulary.entries],
            "min_values_per_window": bundle.vocabulary.min_values_per_window,
            "min_window_fraction": bundle.vocabulary.min_window_fraction,
        },
        "imputation": {
            "columns": bundle.imputation.columns,
            "means": bundle.imputation.means.tolist(),
        },
        "window": {
            "length": bundle.window.length,
            "overlap": bundle.window.overlap,
            "grouping": bundle.window.grouping,
        },
        "kit_max_ms": bundle.kit_max_ms,
    }


def save_bundle(bundle: VerifierBundle, path):
    raw = zlib.compress(json.dumps(_payload(bundle)).encode())
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack(">B", FORMAT_VERSION))
        fh.write(struct.pack(">Q", len(raw)))
        fh.write(raw)
        fh.write(struct.pack(">I", zlib.crc32(raw)))


def load_bundle(path) -> VerifierBundle:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise BundleFormatError("bad magic; not a verifier bundle")
    (version,) = struct.unpack(">B", blob[4:5])
    if version != FORMAT_VERSION:
        raise BundleFormatError(f"unsupported bundle version {version}")
    (length,) = struct.unpack(">Q", blob[5:13])
    raw = blob[13 : 13 + length]
    if len(raw) != length or len(blob) < 13 + length + 4:
        raise BundleFormatError("truncated bundle")
    (crc,) = struct.unpack(">I", blob[13 + length : 17 + length])
    if zlib.crc32(raw) != crc:
        raise BundleFormatError("checksum mismatch; bundle corrupt")
    data = json.loads(zlib.decompress(raw).decode())

    std = None
    if data["standardizer"] is not None:
        std = Standardizer()
        std.mean_ = np.asarray(data["standardizer"]["mean"], dtype=float)
        std.std_ = np.asarray(data["standardizer"]["std"], dtype=float)
    verifier = VerifierModel(
        kind=data["kind"],
        model=_restore_model(data["kind"], data["model"]),
        standardizer=std,
        selected_features=list(data["selected_features"]),
        params=data["params"],
        cv_score=data["cv_score"],
        threshold=data["threshold"],
    )
    vocab = FeatureVocabulary(
        entries=tuple(FeatureKey.from_name(n) for n in data["vocabulary"]["entries"]),
        min_values_per_window=data["vocabulary"]["min_values_per_window"],
        min_window_fraction=data["vocabulary"]["min_window_fraction"],
    )
    imputation = ImputationModel(
        columns=list(data["imputation"]["columns"]),
        means=np.asarray(data["imputation"]["means"], dtype=float),
    )
    window = WindowConfig(**data["window"])
    return VerifierBundle(
        user_id=data["user_id"],
        verifier=verifier,
        vocabulary=vocab,
        imputation=imputation,
        window=window,
        kit_max_ms=float(data["kit_max_ms"]),
    )


def enroll(logs, user_id, classifier, window=WindowConfig(), grid: GridSpec | None = None,
           select_k=50, kit_max_ms=5000.0, cognition_map=None, seed=0) -> VerifierBundle:
    """Train a deployable verifier for one user from multi-user event logs.

    Phase-1 windows of every user form the training pool (target user
    genuine, everyone else impostor).  The decision threshold comes from
    phase-2 scores when that user has phase-2 data, otherwise from
    training scores.
    """
    from .experiments import derive_seed  # local import avoids a cycle
    from .windowing import DEFAULT_COGNITION_MAP

    cmap = cognition_map or DEFAULT_COGNITION_MAP
    train_windows, test_windows = [], []
    for (user, phase), eventlog in sorted(logs.items()):
        target = train_windows if phase == 1 else test_windows
        target.extend(segment(eventlog, window, cmap))
    if not any(w.user_id == user_id for w in train_windows):
        raise ValueError(f"no phase-1 windows for user {user_id!r}")

    vocab = build_vocabulary([extract_window_samples(w, kit_max_ms) for w in train_windows])
    matrix, imputation = fit_matrix(train_windows, vocab, kit_max_ms)
    y = np.array([1 if m.user_id == user_id else 0 for m in matrix.meta])
    user_seed = derive_seed(seed, "enroll", user_id)
    k = min(select_k or len(matrix.columns), len(matrix.columns))
    cols = mrmr_rank(matrix.values, y, k, column_names=matrix.columns).ranked
    spec = grid or GridSpec(seed=user_seed)
    spec = GridSpec(grids=spec.grids, cv_folds=spec.cv_folds, seed=user_seed)
    verifier = train_verifier(
        matrix.values[:, cols], y, classifier, spec,
        selected_features=cols, skip_cv_if_single=True,
    )

    if any(w.user_id == user_id for w in test_windows):
        score_matrix = apply_matrix(test_windows, vocab, imputation, kit_max_ms)
        flags = np.array([m.user_id == user_id for m in score_matrix.meta])
        scores = verifier.score_full(score_matrix.values)
    else:
        flags = y.astype(bool)
        scores = verifier.score_full(matrix.values)
    if flags.any() and (~flags).any():
        verifier.threshold = compute_eer(ScoreSet(scores[flags], scores[~flags])).threshold
    else:
        verifier.threshold = float(np.median(scores))

    return VerifierBundle(
        user_id=user_id,
        verifier=verifier,
        vocabulary=vocab,
        imputation=imputation,
        window=window,
        kit_max_ms=kit_max_ms,
    )
