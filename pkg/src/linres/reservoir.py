"""Linear reservoir construction and state evolution.

Two architectures: a dense Gaussian matrix rescaled to a target spectral
radius, and a block shift register whose state is exactly the last tau
observations (a delay-coordinate embedding).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from linres.rng import generator

_DENSE_EIG_LIMIT = 256


class SpectralRadiusError(RuntimeError):
    """Spectral-radius estimation failed to converge."""


@dataclass(frozen=True)
class ReservoirSystem:
    """The pair (A, C) with a certified spectral radius rho(A) < 1."""

    a: np.ndarray  # (N, N)
    c: np.ndarray  # (N, d)
    spectral_radius: float

    def __post_init__(self):
        if self.a.ndim != 2 or self.a.shape[0] != self.a.shape[1]:
            raise ValueError("A must be square")
        if self.c.ndim != 2 or self.c.shape[0] != self.a.shape[0]:
            raise ValueError("C must be N x d with N matching A")
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.c))):
            raise ValueError("A and C must be finite")
        if not self.spectral_radius < 1:
            raise ValueError("echo state condition requires rho(A) < 1")

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def d(self) -> int:
        return self.c.shape[1]


def _power_spectral_radius(a: np.ndarray, tol: float, max_iter: int = 20000) -> float:
    """Orthogonal iteration on a 2-dim subspace.

    A two-column subspace captures a dominant complex-conjugate pair,
    which plain power iteration on a single vector cannot resolve.
    """
    n = a.shape[0]
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.standard_normal((n, 2)))
    prev = None
    for _ in range(max_iter):
        z = a @ q
        q, _ = np.linalg.qr(z)
        proj = q.T @ a @ q
        est = float(np.max(np.abs(np.linalg.eigvals(proj))))
        if prev is not None and abs(est - prev) <= tol * max(est, 1e-300):
            return est
        prev = est
    raise SpectralRadiusError(f"no convergence after {max_iter} iterations")


def spectral_radius(a: np.ndarray, tol: float = 1e-8) -> float:
    """Largest eigenvalue modulus of A.

    Dense eigenvalue computation for moderate sizes; orthogonal
    iteration beyond that.
    """
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("A must be finite")
    if a.shape[0] <= _DENSE_EIG_LIMIT:
        return float(np.max(np.abs(np.linalg.eigvals(a))))
    return _power_spectral_radius(a, tol)


def build_random(
    n: int, d: int, target_rho: float, input_scale: float, seed: int
) -> ReservoirSystem:
    """Dense Gaussian reservoir rescaled to the target spectral radius.

    A is drawn i.i.d. N(0,1) and multiplied by target_rho / rho(raw);
    C is i.i.d. N(0,1) times input_scale. Deterministic in the seed.
    """
    if not 0 < target_rho < 1:
        raise ValueError("target_rho must lie in (0, 1)")
    if n < 1 or d < 1:
        raise ValueError("n and d must be >= 1")
    rng = generator(seed)
    for _ in range(16):
        raw = rng.standard_normal((n, n))
        rho_raw = spectral_radius(raw)
        if rho_raw > 1e-12:
            break
    else:
        raise SpectralRadiusError("raw draws repeatedly had near-zero spectral radius")
    a = raw * (target_rho / rho_raw)
    c = input_scale * rng.standard_normal((n, d))
    return ReservoirSystem(a=a, c=c, spectral_radius=spectral_radius(a))


def build_takens(n: int, d: int) -> ReservoirSystem:
    """Block shift-register reservoir implementing a delay embedding.

    tau = floor(n/d) delays; the returned system has effective dimension
    tau*d (truncated when d does not divide n). A is the block
    subdiagonal of d x d identities, C injects into the newest block,
    and rho(A) = 0 (nilpotent).
    """
    if n < 2 * d:
        raise ValueError("need n >= 2*d for at least two delays")
    tau = n // d
    m = tau * d
    a = np.zeros((m, m))
    a[d:, : m - d] = np.eye(m - d)
    c = np.zeros((m, d))
    c[:d, :] = np.eye(d)
    return ReservoirSystem(a=a, c=c, spectral_radius=0.0)


def reservoir_step(sys: ReservoirSystem, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """One state update: x' = A x + C u."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != (sys.n,):
        raise ValueError(f"state must have shape ({sys.n},)")
    if u.shape != (sys.d,):
        raise ValueError(f"input must have shape ({sys.d},)")
    return sys.a @ x + sys.c @ u


def drive(sys: ReservoirSystem, x0: np.ndarray, inputs: np.ndarray) -> np.ndarray:
    """Teacher-forced evolution; row t is the state after consuming input row t."""
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != sys.d:
        raise ValueError(f"inputs must be T x {sys.d}")
    x = np.asarray(x0, dtype=float)
    if x.shape != (sys.n,):
        raise ValueError(f"initial state must have shape ({sys.n},)")
    states = np.empty((inputs.shape[0], sys.n))
    for t in range(inputs.shape[0]):
        x = sys.a @ x + sys.c @ inputs[t]
        if not np.all(np.isfinite(x)):
            raise RuntimeError(f"non-finite reservoir state at step {t}")
        states[t] = x
    return states
