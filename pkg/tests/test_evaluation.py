import numpy as np
import pytest

from kdauth.evaluation import (
    DETCurve,
    ScoreSet,
    aggregate_users,
    balanced_accuracy,
    compute_eer,
    det_curve,
)


# ---------------------------------------------------------------- oracle

def eer_oracle(genuine, impostor, grid_points=1000, levels=6):
    """Brute-force threshold sweep with naive per-threshold recounts.

    Sweeps a dense grid, finds where FAR - FRR changes sign, and re-sweeps
    inside that bracket until the bracket is narrower than any score gap
    (10^18 effective thresholds), then interpolates on the bracketing rate
    values.  The crossing value depends only on those rate pairs, so this
    reproduces the documented convention without sharing any code with it.
    """
    genuine = np.asarray(genuine, float)
    impostor = np.asarray(impostor, float)

    def rates(t):
        return float(np.mean(impostor >= t)), float(np.mean(genuine < t))

    scores = np.concatenate([genuine, impostor])
    lo, hi = scores.min() - 1.0, scores.max() + 1.0
    for _ in range(levels):
        grid = np.linspace(lo, hi, grid_points)
        diffs = np.array([rates(t)[0] - rates(t)[1] for t in grid])
        k = int(np.argmax(diffs <= 0))  # diff is non-increasing, starts at +1
        if diffs[k] == 0:
            return rates(grid[k])[0]
        lo, hi = grid[k - 1], grid[k]
    far1, frr1 = rates(lo)
    far2, frr2 = rates(hi)
    d1, d2 = far1 - frr1, far2 - frr2
    s = d1 / (d1 - d2)
    return far1 + s * (far2 - far1)


# ---------------------------------------------------------------- balanced accuracy

class TestBalancedAccuracy:
    def test_perfect(self):
        assert balanced_accuracy([0, 1, 1], [0, 1, 1]) == 1.0

    def test_all_positive_predictor(self):
        y = [1] * 5 + [0] * 95
        assert balanced_accuracy(y, [1] * 100) == 0.5

    def test_confusion_matrix_arithmetic(self):
        y_true = [1] * 10 + [0] * 40
        y_pred = [1] * 8 + [0] * 2 + [0] * 30 + [1] * 10
        assert balanced_accuracy(y_true, y_pred) == pytest.approx(0.775)

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            balanced_accuracy([1, 1], [1, 0])


# ---------------------------------------------------------------- EER

class TestComputeEer:
    def test_perfect_separation(self):
        result = compute_eer(ScoreSet([2, 3, 4], [-4, -3, -2]))
        assert result.eer == 0.0

    def test_identical_distributions(self):
        result = compute_eer(ScoreSet([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]))
        assert result.eer == pytest.approx(0.5)

    def test_matches_dense_sweep_oracle(self):
        rng = np.random.default_rng(42)
        genuine = rng.normal(1.0, 1.0, size=500)
        impostor = rng.normal(-1.0, 1.0, size=500)
        got = compute_eer(ScoreSet(genuine, impostor)).eer
        assert got == pytest.approx(eer_oracle(genuine, impostor), abs=1e-9)

    def test_invariant_under_increasing_transform(self):
        rng = np.random.default_rng(0)
        g = rng.normal(1, 1, 200)
        i = rng.normal(0, 1, 200)
        base = compute_eer(ScoreSet(g, i)).eer
        warped = compute_eer(ScoreSet(np.exp(g), np.exp(i))).eer
        assert warped == pytest.approx(base, abs=1e-12)

    def test_swap_and_negate_invariance(self):
        rng = np.random.default_rng(1)
        g = rng.normal(1, 1, 150)
        i = rng.normal(0, 1, 180)
        base = compute_eer(ScoreSet(g, i)).eer
        swapped = compute_eer(ScoreSet(-i, -g)).eer
        assert swapped == pytest.approx(base, abs=1e-12)

    def test_orientation_warning_above_half(self):
        with pytest.warns(UserWarning, match="orientation"):
            compute_eer(ScoreSet([-2.0, -3.0], [2.0, 3.0]))

    def test_empty_side_rejected(self):
        with pytest.raises(ValueError):
            ScoreSet([], [1.0])


# ---------------------------------------------------------------- DET

class TestDetCurve:
    def scores(self, seed=3):
        rng = np.random.default_rng(seed)
        return ScoreSet(rng.normal(1, 1, 100), rng.normal(-1, 1, 120))

    def test_perfect_separation_touches_origin(self):
        curve = det_curve(ScoreSet([5.0, 6.0], [1.0, 2.0]))
        assert any(f == 0 and r == 0 for f, r in zip(curve.far, curve.frr))

    def test_monotonicity(self):
        curve = det_curve(self.scores())
        assert np.all(np.diff(curve.far) <= 0)
        assert np.all(np.diff(curve.frr) >= 0)

    def test_points_match_naive_recount(self):
        scores = self.scores()
        curve = det_curve(scores)
        for t, far, frr in zip(curve.thresholds, curve.far, curve.frr):
            assert far == pytest.approx(np.mean(scores.impostor >= t))
            assert frr == pytest.approx(np.mean(scores.genuine < t))

    def test_eer_lies_on_curve_crossing(self):
        scores = self.scores()
        result = compute_eer(scores)
        curve = det_curve(scores)
        diffs = curve.far - curve.frr
        crossing = int(np.argmax(diffs <= 0))
        assert min(curve.far[crossing], curve.frr[crossing - 1]) <= result.eer + 1e-12
        assert result.eer <= max(curve.frr[crossing], curve.far[crossing - 1]) + 1e-12


# ---------------------------------------------------------------- aggregation

class TestAggregateUsers:
    def test_single_user(self):
        agg = aggregate_users([("u1", 0.07)])
        assert agg.mean == 0.07 and agg.std == 0.0

    def test_population_std(self):
        agg = aggregate_users([("a", 0.04), ("b", 0.06), ("c", 0.08)])
        assert agg.mean == pytest.approx(0.06)
        assert agg.std == pytest.approx(0.01632993, abs=1e-7)

    def test_outlier_rule(self):
        users = [(f"u{i}", 0.05) for i in range(20)] + [("bad", 0.40)]
        agg = aggregate_users(users)
        assert agg.outliers == ["bad"]
