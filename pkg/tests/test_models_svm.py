import numpy as np
import pytest

from kdauth.models.svm import KernelSVM, rbf_kernel


def qp_oracle(X, y, Cbox, gamma):
    """Dense quadratic-programming solve of the SVM dual via cvxopt."""
    cvxopt = pytest.importorskip("cvxopt")
    from cvxopt import matrix, solvers

    solvers.options["show_progress"] = False
    solvers.options["abstol"] = 1e-10
    solvers.options["reltol"] = 1e-10
    n = len(y)
    K = rbf_kernel(X, X, gamma)
    Q = np.outer(y, y) * K
    P = matrix(Q)
    q = matrix(-np.ones(n))
    G = matrix(np.vstack([-np.eye(n), np.eye(n)]))
    h = matrix(np.concatenate([np.zeros(n), Cbox]))
    A = matrix(y.reshape(1, -1))
    b = matrix(np.zeros(1))
    sol = solvers.qp(P, q, G, h, A, b)
    alpha = np.array(sol["x"]).ravel()
    u = K @ (alpha * y)
    free = (alpha > 1e-6) & (alpha < Cbox - 1e-6)
    bias = float(np.mean(y[free] - u[free])) if free.any() else 0.0
    return alpha, bias


def random_problem(n=20, d=3, seed=0):
    rng = np.random.default_rng(seed)
    y = np.concatenate([np.ones(n // 2), -np.ones(n - n // 2)])
    X = rng.normal(size=(n, d)) + 0.8 * y[:, None]
    return X, y


class TestKernelSVM:
    def test_separable_toy_perfect_training_accuracy(self):
        rng = np.random.default_rng(0)
        X = np.vstack([rng.normal(size=(20, 2)) + 4, rng.normal(size=(20, 2)) - 4])
        y = np.array([1] * 20 + [0] * 20)
        model = KernelSVM(C=10.0, gamma=0.5).fit(X, y)
        assert np.array_equal(model.predict(X), y)

    @pytest.mark.parametrize("seed", range(5))
    def test_kkt_feasibility_within_1e6(self, seed):
        X, y = random_problem(seed=seed)
        model = KernelSVM(C=1.0, gamma=0.3, tol=1e-6).fit(X, (y > 0).astype(int))
        alpha = model.alpha_
        assert np.all(alpha >= -1e-6)
        assert np.all(alpha <= model.box_ + 1e-6)
        assert abs(np.dot(alpha, model.y_)) <= 1e-6

    @pytest.mark.parametrize("seed", range(5))
    def test_decision_values_match_qp_oracle(self, seed):
        X, y = random_problem(n=20, seed=seed)
        model = KernelSVM(C=1.0, gamma=0.3, tol=1e-6).fit(X, (y > 0).astype(int))
        alpha_qp, bias_qp = qp_oracle(X, y, model.box_, model.gamma_)
        K = rbf_kernel(X, X, model.gamma_)
        decision_qp = K @ (alpha_qp * y) + bias_qp
        assert model.decision_function(X) == pytest.approx(decision_qp, abs=1e-3)

    def test_score_orientation(self):
        X, y = random_problem(n=40, seed=3)
        labels = (y > 0).astype(int)
        model = KernelSVM().fit(X, labels)
        scores = model.decision_function(X)
        assert scores[labels == 1].mean() > scores[labels == 0].mean()

    def test_constant_shift_absorbed_by_standardizer(self):
        from kdauth.models import Standardizer

        X, y = random_problem(n=30, seed=4)
        labels = (y > 0).astype(int)
        std = Standardizer()
        base = KernelSVM(tol=1e-6).fit(std.fit_transform(X), labels).decision_function(
            std.transform(X)
        )
        shifted = X + 123.4
        std2 = Standardizer()
        moved = KernelSVM(tol=1e-6).fit(std2.fit_transform(shifted), labels).decision_function(
            std2.transform(shifted)
        )
        assert moved == pytest.approx(base, abs=1e-5)

    def test_class_weights_inverse_frequency(self):
        X, y = random_problem(n=30, seed=5)
        labels = np.array([1] * 10 + [0] * 20)
        model = KernelSVM(C=2.0).fit(X, labels)
        # C_i = C * n / (2 * n_class)
        assert model.box_[0] == pytest.approx(2.0 * 30 / (2 * 10))
        assert model.box_[-1] == pytest.approx(2.0 * 30 / (2 * 20))

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            KernelSVM().fit(np.ones((5, 2)), np.ones(5))

    def test_nonconvergence_flagged(self):
        X, y = random_problem(n=40, seed=6)
        model = KernelSVM(tol=1e-12, max_iter=3).fit(X, (y > 0).astype(int))
        assert model.converged_ is False
