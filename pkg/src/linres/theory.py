"""Stationary-state decomposition checks for the noisy linear reservoir.

The driven state splits into a deterministic synchronization series plus
a zero-mean Gaussian term whose covariance solves the discrete Lyapunov
equation S = A S A^T + sigma^2 C C^T. This module computes the truncated
synchronization series, its consistency residual, the Lyapunov
covariance, and Monte Carlo estimates of the stationary noise moments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import kurtosis, skew

from linres.reservoir import ReservoirSystem, build_random
from linres.rng import generator


class LyapunovConvergenceError(RuntimeError):
    """Fixed-point iteration failed to converge (rho(A) >= 1 or ill-conditioned)."""


@dataclass(frozen=True)
class Covariance:
    """Symmetric positive-semidefinite stationary covariance."""

    s: np.ndarray

    def __post_init__(self):
        scale = np.linalg.norm(self.s)
        if scale > 0:
            if np.linalg.norm(self.s - self.s.T) > 1e-10 * scale:
                raise ValueError("covariance must be symmetric")
            if np.min(np.linalg.eigvalsh(self.s)) < -1e-10 * scale:
                raise ValueError("covariance must be positive semidefinite")


@dataclass(frozen=True)
class GsApproximation:
    """Truncated synchronization series with a geometric tail estimate."""

    value: np.ndarray
    truncation_depth: int
    tail_bound: float


def solve_lyapunov(
    a: np.ndarray, c: np.ndarray, sigma: float, tol: float = 1e-12, max_iter: int = 100000
) -> Covariance:
    """Fixed-point iteration S_{k+1} = A S_k A^T + sigma^2 C C^T from S_0 = 0.

    This is the defining series sigma^2 * sum_k A^k C C^T (A^T)^k of the
    stationary noise covariance; it converges geometrically at rate
    rho(A)^2. Nilpotent A terminates exactly after the nilpotency index.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    q = sigma**2 * (c @ c.T)
    s = np.zeros_like(q)
    for _ in range(max_iter):
        s_next = a @ s @ a.T + q
        change = np.linalg.norm(s_next - s)
        s = s_next
        if change <= tol * max(np.linalg.norm(s), 1e-300):
            s = 0.5 * (s + s.T)
            return Covariance(s=s)
    raise LyapunovConvergenceError(
        f"no convergence in {max_iter} iterations; is rho(A) < 1?"
    )


def lyapunov_residual(a: np.ndarray, c: np.ndarray, sigma: float, cov: Covariance) -> float:
    """Relative Frobenius residual of S = A S A^T + sigma^2 C C^T."""
    s = cov.s
    res = s - a @ s @ a.T - sigma**2 * (c @ c.T)
    return float(np.linalg.norm(res) / max(np.linalg.norm(s), 1e-300))


def gs_truncated(sys: ReservoirSystem, obs_history: np.ndarray, k: int) -> GsApproximation:
    """Partial synchronization sum over the last k observations.

    obs_history is newest-first: row j is the observation j steps into
    the past relative to the evaluation point, so the sum is
    sum_{j<k} A^j C obs_history[j]. The tail estimate is
    ||A^k C|| * max||obs|| / (1 - rho(A)).
    """
    if k < 1:
        raise ValueError("truncation depth must be >= 1")
    obs_history = np.asarray(obs_history, dtype=float)
    if obs_history.shape[0] < k or obs_history.shape[1] != sys.d:
        raise ValueError(f"need at least {k} rows of {sys.d}-dim observations")
    value = np.zeros(sys.n)
    p = sys.c.copy()  # A^j C
    for j in range(k):
        value += p @ obs_history[j]
        p = sys.a @ p
    max_obs = float(np.max(np.linalg.norm(obs_history[:k], axis=1)))
    tail = float(np.linalg.norm(p, 2)) * max_obs / max(1.0 - sys.spectral_radius, 1e-12)
    return GsApproximation(value=value, truncation_depth=k, tail_bound=tail)


def gs_consistency_residual(
    sys: ReservoirSystem,
    obs_history_at_m: np.ndarray,
    obs_at_phi_m: np.ndarray,
    k: int,
) -> float:
    """Defect in f(phi(m)) = A f(m) + C omega(phi(m)) under truncation at depth k.

    The history at phi(m) is obs_at_phi_m prepended to the history at m
    (both truncated to k rows); the residual is exactly the dropped term
    A^k C obs_history_at_m[k-1], so it obeys the geometric tail bound.
    """
    obs_history_at_m = np.asarray(obs_history_at_m, dtype=float)
    obs_at_phi_m = np.asarray(obs_at_phi_m, dtype=float)
    hist_phi = np.vstack([obs_at_phi_m, obs_history_at_m[: k - 1]])
    f_m = gs_truncated(sys, obs_history_at_m, k).value
    f_phi = gs_truncated(sys, hist_phi, k).value
    return float(np.linalg.norm(f_phi - (sys.a @ f_m + sys.c @ obs_at_phi_m)))


def sample_stationary_noise(
    sys: ReservoirSystem, sigma: float, n_samples: int, burn_in: int, seed: int
) -> np.ndarray:
    """States of the noise-only chain X_t = A X_{t-1} + C xi_t after burn-in."""
    rng = generator(seed)
    x = np.zeros(sys.n)
    noise = sigma * rng.standard_normal((burn_in + n_samples, sys.d))
    samples = np.empty((n_samples, sys.n))
    for t in range(burn_in):
        x = sys.a @ x + sys.c @ noise[t]
    for t in range(n_samples):
        x = sys.a @ x + sys.c @ noise[burn_in + t]
        samples[t] = x
    return samples


def empirical_noise_covariance(
    sys: ReservoirSystem, sigma: float, n_samples: int, burn_in: int, seed: int
) -> Covariance:
    """Sample covariance of the stationary noise-only chain."""
    if sigma == 0:
        return Covariance(s=np.zeros((sys.n, sys.n)))
    samples = sample_stationary_noise(sys, sigma, n_samples, burn_in, seed)
    centered = samples - samples.mean(axis=0)
    s = centered.T @ centered / n_samples
    return Covariance(s=0.5 * (s + s.T))


def moment_checks(
    samples: np.ndarray, skew_bound: float = 0.05, kurt_bound: float = 0.1
) -> list[dict]:
    """Per-component skewness / excess kurtosis against Gaussian bounds."""
    out = []
    for i in range(samples.shape[1]):
        sk = float(skew(samples[:, i]))
        ku = float(kurtosis(samples[:, i]))  # excess
        out.append(
            {
                "component": i,
                "skewness": sk,
                "excess_kurtosis": ku,
                "skew_bound": skew_bound,
                "kurtosis_bound": kurt_bound,
                "ok": abs(sk) <= skew_bound and abs(ku) <= kurt_bound,
            }
        )
    return out


def verification_report(
    n: int,
    rho: float,
    noise_sigma: float,
    n_samples: int,
    burn_in: int = 1000,
    input_scale: float = 0.1,
    d: int = 3,
    seed: int = 0,
    gs_depth: int = 300,
) -> dict:
    """Numerical check of the stationary decomposition on a random reservoir.

    Returns a JSON-serializable report: Lyapunov residual, empirical vs
    analytic covariance error, synchronization consistency residual, and
    per-component Gaussian moment checks.
    """
    sys = build_random(n, d, rho, input_scale, seed)
    cov = solve_lyapunov(sys.a, sys.c, noise_sigma)
    resid = lyapunov_residual(sys.a, sys.c, noise_sigma, cov)
    samples = sample_stationary_noise(sys, noise_sigma, n_samples, burn_in, seed)
    centered = samples - samples.mean(axis=0)
    emp = centered.T @ centered / n_samples
    rel_err = float(np.linalg.norm(emp - cov.s) / np.linalg.norm(cov.s))
    rng = generator(seed + 1)
    history = rng.standard_normal((gs_depth + 1, d))
    gs_resid = gs_consistency_residual(sys, history[1:], history[0], gs_depth)
    return {
        "n": n,
        "d": d,
        "rho": rho,
        "noise_sigma": noise_sigma,
        "n_samples": n_samples,
        "burn_in": burn_in,
        "seed": seed,
        "lyapunov_residual": resid,
        "empirical_vs_analytic_frobenius_rel_error": rel_err,
        "gs_consistency_residual": gs_resid,
        "moment_checks": moment_checks(samples),
    }
