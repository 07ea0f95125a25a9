"""Evaluation-grid orchestration: per-user verification across scenario and
cognitive-load train/test configurations, plus the window/overlap sweep.

Every cell trains one binary verifier per enrolled user (that user genuine,
all others impostors) on phase-1 windows and scores phase-2 windows.
Vocabulary, imputation means, standardizers, SMOTE and MRMR are all fitted
on the cell's training partition only.
"""

from __future__ import annotations

import logging
import zlib
from dataclasses import dataclass, field

import numpy as np

from .evaluation import ScoreSet, aggregate_users, compute_eer, det_curve
from .features import apply_matrix, build_vocabulary, extract_window_samples, fit_matrix
from .models import GridSpec, train_verifier
from .models.gridsearch import grid_search_cv
from .selection import MISpec, mrmr_rank
from .windowing import WindowConfig, segment, sweep_grid

log = logging.getLogger(__name__)

SCENARIO_MODES = ("SU", "SA:bona", "SA:para", "SA:tsrc")
COGNITION_CODES = ("U", "HH", "LL", "HL", "LH")
CLASSIFIERS = ("svm", "mlp", "gbt")

_SCENARIO_OF_MODE = {"SA:bona": 1, "SA:para": 2, "SA:tsrc": 3}
_LEVELS_OF_CODE = {
    "U": (("low", "high"), ("low", "high")),
    "HH": (("high",), ("high",)),
    "LL": (("low",), ("low",)),
    "HL": (("high",), ("low",)),
    "LH": (("low",), ("high",)),
}


@dataclass(frozen=True)
class CognitionMap:
    """Question number -> cognitive-load level ("low"/"high")."""

    mapping: tuple = tuple(sorted({1: "low", 2: "low", 3: "low", 4: "high", 5: "high", 6: "high"}.items()))

    def __post_init__(self):
        levels = dict(self.mapping)
        if set(levels) != {1, 2, 3, 4, 5, 6} or not set(levels.values()) <= {"low", "high"}:
            raise ValueError("cognition map must cover questions 1..6 with low/high levels")

    def as_dict(self):
        return dict(self.mapping)

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(sorted((int(k), v) for k, v in d.items())))


@dataclass(frozen=True)
class ConfigCell:
    scenario_mode: str  # SU | SA:bona | SA:para | SA:tsrc
    cognition_code: str  # U | HH | LL | HL | LH
    classifier: str  # svm | mlp | gbt
    window: WindowConfig = WindowConfig()

    def __post_init__(self):
        if self.scenario_mode not in SCENARIO_MODES:
            raise ValueError(f"unknown scenario mode {self.scenario_mode!r}")
        if self.cognition_code not in COGNITION_CODES:
            raise ValueError(f"unknown cognition code {self.cognition_code!r}")
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"unknown classifier {self.classifier!r}")

    @property
    def cell_id(self):
        mode = self.scenario_mode.replace(":", "-")
        return f"{mode}_{self.cognition_code}_{self.classifier}_L{self.window.length}_O{self.window.overlap}"


def full_grid(window=WindowConfig(), classifiers=CLASSIFIERS):
    """All scenario-mode x cognition-code x classifier cells (60 by default)."""
    return [
        ConfigCell(mode, code, clf, window)
        for mode in SCENARIO_MODES
        for code in COGNITION_CODES
        for clf in classifiers
    ]


def derive_seed(seed, *parts):
    """Stable per-job seed independent of scheduling order."""
    token = ":".join(str(p) for p in parts)
    return (int(seed) ^ zlib.crc32(token.encode())) % 2**32


@dataclass
class SplitPlan:
    user_id: str
    train_rows: np.ndarray  # indices into the cell's training matrix
    test_rows: np.ndarray


@dataclass
class UserResult:
    user_id: str
    eer: float
    threshold: float
    cv_score: float
    params: dict
    n_train_genuine: int
    n_test_genuine: int
    genuine_scores: np.ndarray
    impostor_scores: np.ndarray
    selected_columns: list[str]
    verifier: object | None = None  # populated only under keep_models


@dataclass
class EvalReport:
    cell: ConfigCell
    users: list[UserResult]
    mean_eer: float
    std_eer: float
    pooled_eer: float
    pooled_det: object  # DETCurve over pooled scores
    degenerate_users: list[str]
    vocabulary: object | None = None  # populated only under keep_models
    imputation: object | None = None


def _cell_windows(logs, cell: ConfigCell, cognition_map: CognitionMap):
    """Segment and filter every log for one cell; returns (train, test) windows."""
    scenario = _SCENARIO_OF_MODE.get(cell.scenario_mode)
    train_levels, test_levels = _LEVELS_OF_CODE[cell.cognition_code]
    cmap = cognition_map.as_dict()
    train, test = [], []
    for (user, phase), eventlog in sorted(logs.items()):
        for w in segment(eventlog, cell.window, cmap):
            if scenario is not None and w.scenario != scenario:
                continue
            if phase == 1 and w.cognition in train_levels:
                train.append(w)
            elif phase == 2 and w.cognition in test_levels:
                test.append(w)
    return train, test


def plan_splits(train_meta, test_meta, users):
    """Per-user one-vs-rest row plans over the cell's train/test matrices."""
    train_users = np.array([m.user_id for m in train_meta])
    test_users = np.array([m.user_id for m in test_meta])
    plans = []
    for user in users:
        plans.append(
            SplitPlan(
                user_id=user,
                train_rows=np.flatnonzero(train_users == user),
                test_rows=np.flatnonzero(test_users == user),
            )
        )
    return plans


@dataclass
class RunSettings:
    grid: GridSpec = field(default_factory=GridSpec)
    select_k: int | None = 50  # None selects every column
    mi_spec: MISpec = field(default_factory=MISpec)
    kit_max_ms: float = 5000.0
    cognition_map: CognitionMap = field(default_factory=CognitionMap)
    shuffle_labels: bool = False  # chance-level control
    keep_models: bool = False  # retain fitted artifacts on the report (audits)


def run_cell(logs, cell: ConfigCell, seed=0, settings: RunSettings | None = None) -> EvalReport:
    """Train and evaluate every enrolled user for one configuration cell."""
    settings = settings or RunSettings()
    train_windows, test_windows = _cell_windows(logs, cell, settings.cognition_map)
    users = sorted({u for (u, _p) in logs})
    if not train_windows or not test_windows:
        raise ValueError(f"cell {cell.cell_id} has no train or test windows")

    vocab = build_vocabulary(
        [extract_window_samples(w, settings.kit_max_ms) for w in train_windows]
    )
    train_matrix, imputation = fit_matrix(train_windows, vocab, settings.kit_max_ms)
    test_matrix = apply_matrix(test_windows, vocab, imputation, settings.kit_max_ms)

    results, degenerate = [], []
    for user in users:
        plan = next(
            p for p in plan_splits(train_matrix.meta, test_matrix.meta, [user])
        )
        if len(plan.train_rows) == 0 or len(plan.test_rows) == 0:
            log.warning("cell %s: user %s degenerate (no windows)", cell.cell_id, user)
            degenerate.append(user)
            continue
        user_seed = derive_seed(seed, cell.cell_id, user)
        y_train = np.zeros(train_matrix.n_rows, dtype=int)
        y_train[plan.train_rows] = 1
        if settings.shuffle_labels:
            rng = np.random.default_rng(user_seed)
            y_train = rng.permutation(y_train)

        k = settings.select_k or len(train_matrix.columns)
        ranking = mrmr_rank(
            train_matrix.values, y_train, min(k, len(train_matrix.columns)),
            settings.mi_spec, column_names=train_matrix.columns,
        )
        cols = ranking.ranked
        grid = GridSpec(grids=settings.grid.grids, cv_folds=settings.grid.cv_folds, seed=user_seed)
        verifier = train_verifier(
            train_matrix.values[:, cols], y_train, cell.classifier, grid,
            selected_features=cols, skip_cv_if_single=True,
        )
        scores = verifier.score_full(test_matrix.values)
        genuine = scores[plan.test_rows]
        impostor = np.delete(scores, plan.test_rows)
        eer = compute_eer(ScoreSet(genuine, impostor, user_id=user))
        verifier.threshold = eer.threshold
        results.append(
            UserResult(
                user_id=user,
                eer=eer.eer,
                threshold=eer.threshold,
                cv_score=verifier.cv_score,
                params=verifier.params,
                n_train_genuine=len(plan.train_rows),
                n_test_genuine=len(plan.test_rows),
                genuine_scores=genuine,
                impostor_scores=impostor,
                selected_columns=[train_matrix.columns[c] for c in cols],
                verifier=verifier if settings.keep_models else None,
            )
        )

    if not results:
        raise ValueError(f"cell {cell.cell_id}: every user degenerate")
    agg = aggregate_users([(r.user_id, r.eer) for r in results])
    pooled = ScoreSet(
        np.concatenate([r.genuine_scores for r in results]),
        np.concatenate([r.impostor_scores for r in results]),
    )
    return EvalReport(
        cell=cell,
        users=results,
        mean_eer=agg.mean,
        std_eer=agg.std,
        pooled_eer=compute_eer(pooled).eer,
        pooled_det=det_curve(pooled),
        degenerate_users=degenerate,
        vocabulary=vocab if settings.keep_models else None,
        imputation=imputation if settings.keep_models else None,
    )


def run_sweep(logs, classifiers=CLASSIFIERS, seed=0, settings: RunSettings | None = None,
              lengths=None, fractions=None):
    """Mean stratified-CV balanced accuracy per window config and classifier.

    Phase-1 data only.  Returns {classifier: {(length, overlap): accuracy}};
    users without windows under a config are skipped with a warning.
    """
    settings = settings or RunSettings()
    configs = sweep_grid()
    if lengths is not None:
        configs = [c for c in configs if c.length in lengths]
    if fractions is not None:
        configs = [
            c for c in configs if any(c.overlap == round(c.length * f) for f in fractions)
        ]
    users = sorted({u for (u, _p) in logs})
    heatmap = {clf: {} for clf in classifiers}
    for config in configs:
        cmap = settings.cognition_map.as_dict()
        windows = []
        for (user, phase), eventlog in sorted(logs.items()):
            if phase != 1:
                continue
            windows.extend(segment(eventlog, config, cmap))
        try:
            vocab = build_vocabulary(
                [extract_window_samples(w, settings.kit_max_ms) for w in windows]
            )
        except Exception as exc:
            log.warning("sweep config L=%d O=%d skipped: %s", config.length, config.overlap, exc)
            for clf in classifiers:
                heatmap[clf][(config.length, config.overlap)] = float("nan")
            continue
        matrix, _ = fit_matrix(windows, vocab, settings.kit_max_ms)
        user_col = np.array([m.user_id for m in matrix.meta])
        for clf in classifiers:
            accs = []
            for user in users:
                y = (user_col == user).astype(int)
                if y.sum() < 2 or y.sum() == len(y):
                    log.warning("sweep: user %s skipped at L=%d O=%d", user, config.length, config.overlap)
                    continue
                grid = GridSpec(
                    grids=settings.grid.grids,
                    cv_folds=settings.grid.cv_folds,
                    seed=derive_seed(seed, "sweep", config.length, config.overlap, user),
                )
                _, score = grid_search_cv(matrix.values, y, clf, grid)
                accs.append(score)
            heatmap[clf][(config.length, config.overlap)] = (
                float(np.mean(accs)) if accs else float("nan")
            )
    return heatmap


def best_sweep_cell(heatmap):
    """Argmax (length, overlap) of the classifier-averaged heatmap."""
    keys = next(iter(heatmap.values())).keys()
    means = {
        key: np.nanmean([heatmap[clf][key] for clf in heatmap]) for key in keys
    }
    return max(means, key=lambda k: (not np.isnan(means[k]), means[k]))
