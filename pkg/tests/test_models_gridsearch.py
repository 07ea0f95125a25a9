import numpy as np
import pytest

from kdauth.models import (
    DEFAULT_GRIDS,
    GridSpec,
    grid_search_cv,
    smote,
    stratified_kfold,
    train_verifier,
)


class TestSmote:
    def test_two_points_interpolate_on_segment(self):
        a, b = np.array([0.0, 0.0]), np.array([1.0, 2.0])
        synthetic = smote(np.vstack([a, b]), target_count=50, k_neighbors=1, seed=0)
        for row in synthetic:
            u = row[0]
            assert 0 <= u <= 1
            assert row[1] == pytest.approx(2 * u)

    def test_target_equals_current_count(self):
        X = np.random.default_rng(0).normal(size=(5, 3))
        assert smote(X, target_count=5).shape == (0, 3)

    @pytest.mark.parametrize("seed", range(5))
    def test_synthetic_rows_within_bounding_box(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(12, 4))
        synthetic = smote(X, target_count=60, seed=seed)
        assert np.all(synthetic >= X.min(axis=0) - 1e-12)
        assert np.all(synthetic <= X.max(axis=0) + 1e-12)

    def test_single_row_duplicates_with_warning(self):
        with pytest.warns(UserWarning):
            out = smote(np.ones((1, 2)), target_count=4)
        assert out.shape == (3, 2)
        assert np.all(out == 1)


class TestStratifiedKfold:
    def test_fold_class_counts(self):
        y = np.array([1] * 40 + [0] * 200)
        for train_idx, test_idx in stratified_kfold(y, 5, seed=0):
            assert int(y[test_idx].sum()) == 8
            assert len(test_idx) - int(y[test_idx].sum()) == 40

    def test_folds_partition_indices(self):
        y = np.array([1] * 13 + [0] * 29)
        folds = stratified_kfold(y, 5, seed=1)
        all_test = np.concatenate([t for _, t in folds])
        assert sorted(all_test) == list(range(42))
        for train_idx, test_idx in folds:
            assert set(train_idx).isdisjoint(test_idx)

    def test_small_class_reduces_folds(self):
        y = np.array([1] * 3 + [0] * 20)
        assert len(stratified_kfold(y, 5, seed=0)) == 3

    def test_seed_determinism(self):
        y = np.arange(30) % 2
        a = stratified_kfold(y, 5, seed=9)
        b = stratified_kfold(y, 5, seed=9)
        for (ta, sa), (tb, sb) in zip(a, b):
            assert np.array_equal(ta, tb) and np.array_equal(sa, sb)


def separable_data(n=60, seed=0):
    rng = np.random.default_rng(seed)
    y = np.array([1] * (n // 3) + [0] * (n - n // 3))
    X = rng.normal(size=(n, 4)) + 2.0 * y[:, None]
    return X, y


class TestGridSearchCV:
    def spec(self):
        return GridSpec(
            grids={
                "svm": {"C": [0.1, 1.0], "gamma": ["auto"]},
                "mlp": {"hidden": [4], "lr": [0.05], "epochs": [40]},
                "gbt": {"n_trees": [10, 20], "depth": [2], "lr": [0.3]},
            },
            cv_folds=3,
            seed=0,
        )

    @pytest.mark.parametrize("kind", ["svm", "mlp", "gbt"])
    def test_finds_good_cell_on_separable_data(self, kind):
        X, y = separable_data()
        params, score = grid_search_cv(X, y, kind, self.spec())
        assert score > 0.85
        assert params in list(self.spec().cells(kind))

    def test_deterministic_best_cell(self):
        X, y = separable_data(seed=3)
        a = grid_search_cv(X, y, "gbt", self.spec())
        b = grid_search_cv(X, y, "gbt", self.spec())
        assert a == b

    def test_fold_isolation_from_test_labels(self):
        # shuffling one test fold's labels must not change fitted parameters
        X, y = separable_data(seed=5)
        spec = self.spec()
        folds = stratified_kfold(y, spec.cv_folds, spec.seed)
        train_idx, test_idx = folds[0]
        from kdauth.models.gridsearch import fit_with_preprocessing

        model_a, _ = fit_with_preprocessing("gbt", {"n_trees": 5, "depth": 2, "lr": 0.3}, X[train_idx], y[train_idx])
        y_shuffled = y.copy()
        y_shuffled[test_idx] = np.random.default_rng(0).permutation(y_shuffled[test_idx])
        model_b, _ = fit_with_preprocessing("gbt", {"n_trees": 5, "depth": 2, "lr": 0.3}, X[train_idx], y_shuffled[train_idx])
        assert np.array_equal(model_a.decision_function(X), model_b.decision_function(X))

    def test_single_cell_can_skip_cv(self):
        X, y = separable_data(seed=7)
        spec = GridSpec(grids={"gbt": {"n_trees": [5], "depth": [2], "lr": [0.3]}}, seed=0)
        params, score = grid_search_cv(X, y, "gbt", spec, skip_cv_if_single=True)
        assert np.isnan(score)

    def test_default_grids_cover_all_kinds(self):
        assert set(DEFAULT_GRIDS) == {"svm", "mlp", "gbt"}


class TestTrainVerifier:
    def test_orientation_and_scoring(self):
        X, y = separable_data(seed=11)
        spec = GridSpec(
            grids={"svm": {"C": [1.0], "gamma": ["auto"]}}, cv_folds=3, seed=0
        )
        verifier = train_verifier(X, y, "svm", spec, skip_cv_if_single=True)
        scores = verifier.score(X)
        assert scores[y == 1].mean() > scores[y == 0].mean()

    def test_selected_features_applied_by_score_full(self):
        X, y = separable_data(seed=13)
        spec = GridSpec(grids={"gbt": {"n_trees": [10], "depth": [2], "lr": [0.3]}}, seed=0)
        verifier = train_verifier(
            X[:, [1, 2]], y, "gbt", spec, selected_features=[1, 2], skip_cv_if_single=True
        )
        assert verifier.score_full(X) == pytest.approx(verifier.score(X[:, [1, 2]]))
