import numpy as np
import pytest

from linres.reservoir import ReservoirSystem, build_random, build_takens
from linres.theory import (
    Covariance,
    LyapunovConvergenceError,
    empirical_noise_covariance,
    gs_consistency_residual,
    gs_truncated,
    lyapunov_residual,
    moment_checks,
    sample_stationary_noise,
    solve_lyapunov,
    verification_report,
)

SCALAR = ReservoirSystem(a=np.array([[0.5]]), c=np.array([[1.0]]), spectral_radius=0.5)


class TestSolveLyapunov:
    def test_zero_a(self):
        c = np.array([[1.0, 0.0], [0.0, 2.0], [1.0, 1.0]])
        cov = solve_lyapunov(np.zeros((3, 3)), c, 0.5)
        np.testing.assert_allclose(cov.s, 0.25 * c @ c.T, atol=1e-15)

    def test_scalar_closed_form(self):
        cov = solve_lyapunov(SCALAR.a, SCALAR.c, 1.0)
        assert abs(cov.s[0, 0] - 4.0 / 3.0) < 1e-10

    def test_takens_nilpotent_block_identity(self):
        sys = build_takens(12, 3)
        cov = solve_lyapunov(sys.a, sys.c, 1.0)
        np.testing.assert_array_equal(cov.s, np.eye(12))
        assert lyapunov_residual(sys.a, sys.c, 1.0, cov) < 1e-14

    def test_residual_invariant(self):
        sys = build_random(30, 3, 0.9, 0.1, seed=0)
        cov = solve_lyapunov(sys.a, sys.c, 0.1, tol=1e-12)
        assert lyapunov_residual(sys.a, sys.c, 0.1, cov) < 1e-11

    def test_sigma_scaling_is_exact(self):
        # doubling sigma multiplies Q by 4 exactly, and the whole
        # iteration is linear in Q, so the solutions match bitwise
        sys = build_random(8, 2, 0.7, 0.3, seed=1)
        s1 = solve_lyapunov(sys.a, sys.c, 1.0).s
        s2 = solve_lyapunov(sys.a, sys.c, 2.0).s
        assert np.array_equal(s2, 4.0 * s1)

    def test_unstable_a_fails(self):
        with pytest.raises(LyapunovConvergenceError):
            solve_lyapunov(1.1 * np.eye(2), np.ones((2, 1)), 1.0, max_iter=500)

    def test_covariance_invariants_enforced(self):
        with pytest.raises(ValueError):
            Covariance(s=np.array([[1.0, 2.0], [0.0, 1.0]]))
        with pytest.raises(ValueError):
            Covariance(s=np.array([[-1.0, 0.0], [0.0, 1.0]]))


class TestGsTruncated:
    def test_zero_a_collapses_to_first_term(self):
        sys = ReservoirSystem(a=np.zeros((2, 2)), c=np.eye(2), spectral_radius=0.0)
        hist = np.array([[1.0, 2.0], [9.0, 9.0]])
        approx = gs_truncated(sys, hist, 2)
        np.testing.assert_array_equal(approx.value, [1.0, 2.0])

    def test_depth_one_ignores_a(self):
        sys = build_random(6, 2, 0.8, 0.5, seed=2)
        hist = np.random.default_rng(0).standard_normal((3, 2))
        approx = gs_truncated(sys, hist, 1)
        np.testing.assert_allclose(approx.value, sys.c @ hist[0])

    def test_scalar_geometric_series(self):
        hist = np.ones((20, 1))
        approx = gs_truncated(SCALAR, hist, 20)
        assert approx.value[0] == pytest.approx(2.0 * (1 - 0.5**20))

    def test_tail_bound_decreases_geometrically(self):
        sys = build_random(20, 3, 0.9, 0.1, seed=3)
        hist = np.random.default_rng(1).standard_normal((250, 3))
        tails = [gs_truncated(sys, hist, k).tail_bound for k in (50, 100, 200)]
        assert tails[0] > tails[1] > tails[2]
        assert tails[2] < 1e-6 * tails[0]

    def test_truncation_error_bounded_by_next_term(self):
        sys = build_random(15, 3, 0.85, 0.2, seed=4)
        hist = np.random.default_rng(2).standard_normal((60, 3))
        for k in (10, 30, 50):
            v1 = gs_truncated(sys, hist, k).value
            v2 = gs_truncated(sys, hist, k + 1).value
            akc = np.linalg.matrix_power(sys.a, k) @ sys.c
            bound = np.linalg.norm(akc, 2) * np.max(np.linalg.norm(hist, axis=1))
            assert np.linalg.norm(v2 - v1) <= bound * (1 + 1e-12)


class TestGsConsistency:
    def test_zero_a_exact(self):
        sys = ReservoirSystem(a=np.zeros((2, 2)), c=np.eye(2), spectral_radius=0.0)
        hist = np.random.default_rng(3).standard_normal((5, 2))
        assert gs_consistency_residual(sys, hist, np.array([1.0, -1.0]), 4) == 0.0

    def test_nilpotent_exact_beyond_memory(self):
        sys = build_takens(12, 3)  # tau = 4
        rng = np.random.default_rng(4)
        hist = rng.standard_normal((10, 3))
        assert gs_consistency_residual(sys, hist, rng.standard_normal(3), 6) < 1e-13

    def test_deep_truncation_residual_tiny(self):
        sys = build_random(30, 3, 0.9, 0.1, seed=5)
        rng = np.random.default_rng(5)
        hist = rng.standard_normal((300, 3))
        resid = gs_consistency_residual(sys, hist, rng.standard_normal(3), 300)
        assert resid < 1e-12

    def test_residual_within_tail_bound(self):
        sys = build_random(20, 3, 0.9, 0.1, seed=6)
        rng = np.random.default_rng(6)
        hist = rng.standard_normal((80, 3))
        obs = rng.standard_normal(3)
        resid = gs_consistency_residual(sys, hist, obs, 80)
        assert resid <= gs_truncated(sys, hist, 80).tail_bound + 1e-15


class TestEmpiricalCovariance:
    def test_zero_sigma(self):
        sys = build_random(5, 2, 0.8, 0.3, seed=7)
        cov = empirical_noise_covariance(sys, 0.0, 100, 10, seed=0)
        assert np.all(cov.s == 0)

    def test_scalar_variance_in_band(self):
        emp = empirical_noise_covariance(SCALAR, 1.0, 10**6, 1000, seed=3)
        assert 1.330 <= emp.s[0, 0] <= 1.337

    def test_matches_analytic_covariance(self):
        sys = build_random(10, 3, 0.9, 0.1, seed=42)
        emp = empirical_noise_covariance(sys, 0.1, 200000, 1000, seed=0)
        analytic = solve_lyapunov(sys.a, sys.c, 0.1)
        rel = np.linalg.norm(emp.s - analytic.s) / np.linalg.norm(analytic.s)
        assert rel < 0.05

    def test_stationary_mean_matches_noise_free_state(self):
        # Fixed deterministic drive, many noise realizations: the mean
        # state converges to the noise-free state (noise does not break
        # the synchronization).
        sys = build_random(10, 3, 0.9, 0.1, seed=8)
        rng = np.random.default_rng(7)
        n_real, steps, sigma = 10**4, 300, 0.1
        inputs = rng.standard_normal((steps, 3))
        clean = np.zeros(10)
        states = np.zeros((10, n_real))
        for t in range(steps):
            clean = sys.a @ clean + sys.c @ inputs[t]
            noise = sigma * rng.standard_normal((3, n_real))
            states = sys.a @ states + sys.c @ (inputs[t][:, None] + noise)
        component_std = np.sqrt(np.diag(solve_lyapunov(sys.a, sys.c, sigma).s))
        tol = 3.0 * component_std / np.sqrt(n_real)
        assert np.all(np.abs(states.mean(axis=1) - clean) <= tol)


class TestMomentChecks:
    def test_gaussian_samples_pass(self):
        sys = build_random(10, 3, 0.9, 0.1, seed=42)
        samples = sample_stationary_noise(sys, 0.1, 200000, 1000, seed=0)
        assert all(m["ok"] for m in moment_checks(samples))

    def test_skewed_samples_fail(self):
        samples = np.random.default_rng(8).exponential(size=(50000, 1))
        assert not moment_checks(samples)[0]["ok"]


class TestVerificationReport:
    def test_report_schema_and_values(self):
        report = verification_report(n=10, rho=0.9, noise_sigma=0.1, n_samples=20000)
        assert report["lyapunov_residual"] < 1e-10
        assert report["empirical_vs_analytic_frobenius_rel_error"] < 0.2
        assert report["gs_consistency_residual"] < 1e-10
        assert len(report["moment_checks"]) == 10
        import json

        json.dumps(report)  # must be serializable
