import numpy as np
import pytest

from linres.readout import (
    ReadoutWeights,
    RegressionProblem,
    RidgeSolveError,
    predict_one_step,
    ridge_fit,
)


def gaussian_elimination_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Independent dense solver: elimination with partial pivoting.

    Deliberately avoids numpy.linalg so it can serve as an oracle for
    the Cholesky-based ridge solver.
    """
    a = a.astype(float).copy()
    b = b.astype(float).copy()
    n = a.shape[0]
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[pivot, col]) < 1e-300:
            raise ZeroDivisionError("singular matrix")
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            b[[col, pivot]] = b[[pivot, col]]
        for row in range(col + 1, n):
            factor = a[row, col] / a[col, col]
            a[row, col:] -= factor * a[col, col:]
            b[row] -= factor * b[col]
    x = np.zeros_like(b)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1 :] @ x[row + 1 :]) / a[row, row]
    return x


def ridge_oracle(x: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    return gaussian_elimination_solve(x.T @ x + lam * np.eye(x.shape[1]), x.T @ y)


class TestRidgeFit:
    def test_identity_design_recovers_targets(self):
        y = np.random.default_rng(0).standard_normal((6, 2))
        w = ridge_fit(RegressionProblem(x=np.eye(6), y=y), 1e-12).w
        np.testing.assert_allclose(w, y, atol=1e-10)

    def test_ols_mean(self):
        prob = RegressionProblem(x=np.array([[1.0], [1.0]]), y=np.array([[1.0], [3.0]]))
        assert ridge_fit(prob, 0.0).w[0, 0] == pytest.approx(2.0)

    def test_shrunk_solution(self):
        prob = RegressionProblem(x=np.array([[1.0], [1.0]]), y=np.array([[1.0], [3.0]]))
        assert ridge_fit(prob, 2.0).w[0, 0] == pytest.approx(1.0)

    def test_matches_elimination_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            n = rng.integers(1, 9)
            m = rng.integers(n, 21)
            x = rng.standard_normal((m, n))
            y = rng.standard_normal((m, 2))
            lam = float(rng.uniform(1e-6, 1.0))
            np.testing.assert_allclose(
                ridge_fit(RegressionProblem(x=x, y=y), lam).w,
                ridge_oracle(x, y, lam),
                atol=1e-8,
                rtol=1e-8,
            )

    def test_shrinkage_monotonicity(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((30, 5))
        y = rng.standard_normal((30, 3))
        prob = RegressionProblem(x=x, y=y)
        norms = [
            np.linalg.norm(ridge_fit(prob, lam).w)
            for lam in (1e-6, 1e-3, 1.0, 10.0)
        ]
        assert all(a >= b for a, b in zip(norms, norms[1:]))

    def test_singular_unregularized_problem(self):
        # rank-1 design with two columns
        x = np.array([[1.0, 1.0], [2.0, 2.0]])
        y = np.array([[1.0], [2.0]])
        with pytest.raises(RidgeSolveError):
            ridge_fit(RegressionProblem(x=x, y=y), 0.0)

    def test_normal_equation_residual(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((500, 40)) * 10
        y = rng.standard_normal((500, 3))
        w = ridge_fit(RegressionProblem(x=x, y=y), 1e-6).w
        gram = x.T @ x + 1e-6 * np.eye(40)
        rel = np.linalg.norm(gram @ w - x.T @ y) / np.linalg.norm(x.T @ y)
        assert rel < 1e-8

    def test_row_count_mismatch(self):
        with pytest.raises(ValueError):
            RegressionProblem(x=np.zeros((3, 2)), y=np.zeros((4, 1)))


class TestPredictOneStep:
    def test_zero_weights(self):
        w = ReadoutWeights(w=np.zeros((5, 3)), lam=0.0)
        assert np.all(predict_one_step(w, np.ones(5)) == 0)

    def test_identity_block_selects_components(self):
        w = np.zeros((5, 2))
        w[:2, :2] = np.eye(2)
        x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        np.testing.assert_array_equal(
            predict_one_step(ReadoutWeights(w=w, lam=0.0), x), [1.0, 2.0]
        )

    def test_fit_then_evaluate_on_exact_linear_data(self):
        rng = np.random.default_rng(4)
        true_w = rng.standard_normal((6, 2))
        x = rng.standard_normal((40, 6))
        y = x @ true_w
        weights = ridge_fit(RegressionProblem(x=x, y=y), 1e-12)
        for row in range(5):
            np.testing.assert_allclose(
                predict_one_step(weights, x[row]), y[row], atol=1e-8
            )

    def test_dimension_mismatch(self):
        w = ReadoutWeights(w=np.zeros((5, 3)), lam=0.0)
        with pytest.raises(ValueError):
            predict_one_step(w, np.ones(4))
